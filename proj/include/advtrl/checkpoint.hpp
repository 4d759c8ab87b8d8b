#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "advtrl/nn.hpp"
#include "advtrl/tensor.hpp"

namespace advtrl {

/// On-disk agent bundle. Binary layout:
///   "ATRL" | u16 version | u32 header_len | header JSON |
///   f32-LE parameter payload (per network, per layer: weights then biases) |
///   f32-LE state payload | u32 CRC32 of all preceding bytes
struct Checkpoint {
    struct NamedNetwork {
        std::string name;
        nn::NetworkSpec spec;
        nn::Params params;
    };

    nlohmann::json meta;  // experiment metadata (env config, stack mode, ...)
    std::vector<NamedNetwork> networks;
    std::vector<Tensor> states;  // stored observation states for transfer

    const NamedNetwork& network(const std::string& name) const;
};

inline constexpr uint16_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Single-network convenience wrappers.
void save_checkpoint(const nn::NetworkSpec& spec, const nn::Params& params,
                     const std::filesystem::path& path);
std::pair<nn::NetworkSpec, nn::Params> load_network_checkpoint(const std::filesystem::path& path);

/// CRC-32 (IEEE 802.3, reflected 0xEDB88320).
uint32_t crc32(const uint8_t* data, size_t len);

nlohmann::json spec_to_json(const nn::NetworkSpec& spec);
nn::NetworkSpec spec_from_json(const nlohmann::json& j);

}  // namespace advtrl
