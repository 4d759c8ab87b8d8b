#include "advtrl/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "advtrl/errors.hpp"

namespace advtrl {

namespace {

std::array<uint32_t, 256> make_crc_table() {
    std::array<uint32_t, 256> table{};
    for (uint32_t i = 0; i < 256; ++i) {
        uint32_t c = i;
        for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_f32(std::vector<uint8_t>& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

class Reader {
public:
    Reader(const uint8_t* data, size_t len) : data_(data), len_(len) {}
    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    std::string bytes(size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    size_t remaining() const { return len_ - pos_; }

private:
    void need(size_t n) const {
        if (pos_ + n > len_) throw CorruptCheckpoint("checkpoint truncated");
    }
    const uint8_t* data_;
    size_t len_;
    size_t pos_ = 0;
};

nlohmann::json layer_to_json(const nn::LayerSpec& layer) {
    using namespace nn;
    nlohmann::json j;
    if (const auto* d = std::get_if<DenseSpec>(&layer)) {
        j["kind"] = "dense";
        j["in"] = d->in;
        j["out"] = d->out;
    } else if (const auto* c = std::get_if<ConvSpec>(&layer)) {
        j["kind"] = "conv";
        j["in_ch"] = c->in_ch;
        j["out_ch"] = c->out_ch;
        j["kernel"] = c->kernel;
        j["stride"] = c->stride;
    } else if (std::holds_alternative<ReluSpec>(layer)) {
        j["kind"] = "relu";
    } else if (std::holds_alternative<FlattenSpec>(layer)) {
        j["kind"] = "flatten";
    } else {
        j["kind"] = "sigmoid";
    }
    return j;
}

nn::LayerSpec layer_from_json(const nlohmann::json& j) {
    using namespace nn;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dense") return DenseSpec{j.at("in").get<int>(), j.at("out").get<int>()};
    if (kind == "conv")
        return ConvSpec{j.at("in_ch").get<int>(), j.at("out_ch").get<int>(),
                        j.at("kernel").get<int>(), j.at("stride").get<int>()};
    if (kind == "relu") return ReluSpec{};
    if (kind == "flatten") return FlattenSpec{};
    if (kind == "sigmoid") return SigmoidSpec{};
    throw CorruptCheckpoint("unknown layer kind in checkpoint: " + kind);
}

}  // namespace

uint32_t crc32(const uint8_t* data, size_t len) {
    static const std::array<uint32_t, 256> table = make_crc_table();
    uint32_t c = 0xFFFFFFFFu;
    for (size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xffu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

nlohmann::json spec_to_json(const nn::NetworkSpec& spec) {
    nlohmann::json j;
    j["input_shape"] = spec.input_shape;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : spec.layers) j["layers"].push_back(layer_to_json(layer));
    return j;
}

nn::NetworkSpec spec_from_json(const nlohmann::json& j) {
    nn::NetworkSpec spec;
    spec.input_shape = j.at("input_shape").get<std::vector<int>>();
    for (const auto& lj : j.at("layers")) spec.layers.push_back(layer_from_json(lj));
    return spec;
}

const Checkpoint::NamedNetwork& Checkpoint::network(const std::string& name) const {
    for (const auto& net : networks)
        if (net.name == name) return net;
    throw CorruptCheckpoint("checkpoint has no network named '" + name + "'");
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    nlohmann::json header;
    header["meta"] = ckpt.meta;
    header["networks"] = nlohmann::json::array();
    for (const auto& net : ckpt.networks) {
        nlohmann::json nj;
        nj["name"] = net.name;
        nj["spec"] = spec_to_json(net.spec);
        header["networks"].push_back(nj);
    }
    header["states"] = nlohmann::json::array();
    for (const auto& s : ckpt.states) header["states"].push_back(s.shape);

    const std::string header_str = header.dump();

    std::vector<uint8_t> buf;
    buf.push_back('A');
    buf.push_back('T');
    buf.push_back('R');
    buf.push_back('L');
    put_u16(buf, kCheckpointVersion);
    put_u32(buf, static_cast<uint32_t>(header_str.size()));
    buf.insert(buf.end(), header_str.begin(), header_str.end());

    for (const auto& net : ckpt.networks) {
        if (net.params.layers.size() != net.spec.layers.size())
            throw ShapeMismatch("save_checkpoint: params do not match spec for " + net.name);
        for (const auto& l : net.params.layers) {
            for (float v : l.w.data) put_f32(buf, v);
            for (float v : l.b.data) put_f32(buf, v);
        }
    }
    for (const auto& s : ckpt.states)
        for (float v : s.data) put_f32(buf, v);

    put_u32(buf, crc32(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());
    std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 14) throw CorruptCheckpoint("checkpoint truncated");
    if (buf[0] != 'A' || buf[1] != 'T' || buf[2] != 'R' || buf[3] != 'L')
        throw CorruptCheckpoint("bad magic bytes");

    const size_t body_len = buf.size() - 4;
    uint32_t stored_crc = 0;
    for (int i = 0; i < 4; ++i) stored_crc |= static_cast<uint32_t>(buf[body_len + i]) << (8 * i);
    if (crc32(buf.data(), body_len) != stored_crc) throw CorruptCheckpoint("CRC mismatch");

    Reader r(buf.data() + 4, body_len - 4);
    const uint16_t version = r.u16();
    if (version != kCheckpointVersion)
        throw VersionMismatch("unsupported checkpoint version " + std::to_string(version));

    const uint32_t header_len = r.u32();
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(r.bytes(header_len));
    } catch (const nlohmann::json::exception& e) {
        throw CorruptCheckpoint(std::string("bad checkpoint header: ") + e.what());
    }

    Checkpoint ckpt;
    try {
        ckpt.meta = header.at("meta");
        for (const auto& nj : header.at("networks")) {
            Checkpoint::NamedNetwork net;
            net.name = nj.at("name").get<std::string>();
            net.spec = spec_from_json(nj.at("spec"));
            net.params = nn::zeros_like_params<float>(net.spec);
            for (auto& l : net.params.layers) {
                for (float& v : l.w.data) v = r.f32();
                for (float& v : l.b.data) v = r.f32();
            }
            ckpt.networks.push_back(std::move(net));
        }
        for (const auto& sj : header.at("states")) {
            Tensor t = Tensor::zeros(sj.get<std::vector<int>>());
            for (float& v : t.data) v = r.f32();
            ckpt.states.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw CorruptCheckpoint(std::string("bad checkpoint header: ") + e.what());
    }
    if (r.remaining() != 0) throw CorruptCheckpoint("trailing bytes in checkpoint payload");
    return ckpt;
}

void save_checkpoint(const nn::NetworkSpec& spec, const nn::Params& params,
                     const std::filesystem::path& path) {
    Checkpoint ckpt;
    ckpt.meta = nlohmann::json::object();
    ckpt.networks.push_back({"net", spec, params});
    save_checkpoint(ckpt, path);
}

std::pair<nn::NetworkSpec, nn::Params> load_network_checkpoint(const std::filesystem::path& path) {
    Checkpoint ckpt = load_checkpoint(path);
    if (ckpt.networks.empty()) throw CorruptCheckpoint("checkpoint holds no networks");
    return {ckpt.networks.front().spec, ckpt.networks.front().params};
}

}  // namespace advtrl
