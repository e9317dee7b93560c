#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cq/nk/optim.hpp"
#include "cq/nk/tensor.hpp"

namespace cq::pipeline {

/// Named tensors in file order.
using TensorMap = std::vector<std::pair<std::string, nk::Tensor>>;

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// "CQCK", u32 version, u32 count, then per tensor: u16 name length, name
/// bytes, u8 ndim, ndim x u32 dims, f32 values. All little-endian, no padding.
std::vector<std::byte> encode_checkpoint(const TensorMap& tensors);
TensorMap decode_checkpoint(std::span<const std::byte> bytes);

void save_checkpoint(const std::filesystem::path& path, const TensorMap& tensors);
TensorMap load_checkpoint(const std::filesystem::path& path);

const nk::Tensor* find_tensor(const TensorMap& map, const std::string& name);
/// Scalar stored as a one-element tensor; throws InvalidConfig when absent.
double meta_value(const TensorMap& map, const std::string& name);
void put_meta(TensorMap& map, const std::string& name, double value);

/// Copies of the parameter values, keyed by their names.
TensorMap snapshot(std::span<const nk::ParamRef> params);
/// Loads values by name; every parameter must be present with its shape.
void restore(std::span<const nk::ParamRef> params, const TensorMap& map);

}  // namespace cq::pipeline
