// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include "mvsr/core/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace mvsr {

namespace {

constexpr char kMagic[4] = {'M', 'V', 'S', 'C'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& o, uint32_t v) { o.write(reinterpret_cast<const char*>(&v), 4); }
uint32_t read_u32(std::istream& i) {
  uint32_t v = 0;
  i.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

void write_entry(std::ostream& o, const std::string& name, const Tensor& t) {
  write_u32(o, (uint32_t)name.size());
  o.write(name.data(), (std::streamsize)name.size());
  write_u32(o, (uint32_t)t.rank());
  for (int i = 0; i < t.rank(); ++i) write_u32(o, (uint32_t)t.dim(i));
  if (t.dtype() == Dtype::F32)
    o.write(reinterpret_cast<const char*>(t.data<float>()), 4 * (std::streamsize)t.numel());
  else
    o.write(reinterpret_cast<const char*>(t.data<double>()), 8 * (std::streamsize)t.numel());
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamRegistry& registry,
                     bool include_optimizer_state) {
  check(!registry.params().empty() || !registry.buffers().empty(), "empty registry");
  const Dtype dt = !registry.params().empty() ? registry.params()[0]->value.dtype()
                                              : registry.buffers()[0].second.dtype();

  std::vector<std::pair<std::string, Tensor>> entries;
  for (const auto& p : registry.params()) {
    entries.emplace_back(p->name, p->value);
    if (include_optimizer_state && p->adam_m.defined()) {
      entries.emplace_back(p->name + ".adam_m", p->adam_m);
      entries.emplace_back(p->name + ".adam_v", p->adam_v);
      entries.emplace_back(p->name + ".adam_t", Tensor::scalar((double)p->steps, dt));
    }
  }
  for (const auto& [name, t] : registry.buffers()) entries.emplace_back(name, t);

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    check(out.good(), cat("cannot open ", tmp, " for writing"));
    out.write(kMagic, 4);
    write_u32(out, kVersion);
    const uint8_t width = (uint8_t)dtype_size(dt);
    out.write(reinterpret_cast<const char*>(&width), 1);
    write_u32(out, (uint32_t)entries.size());
    for (const auto& [name, t] : entries) {
      check(t.dtype() == dt, cat("mixed dtypes in checkpoint: ", name));
      write_entry(out, name, t);
    }
    check(out.good(), cat("write failed for ", tmp));
  }
  std::filesystem::rename(tmp, path);
}

std::map<std::string, Tensor> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check(in.good(), cat("cannot open checkpoint ", path));
  char magic[4];
  in.read(magic, 4);
  check(in.good() && std::memcmp(magic, kMagic, 4) == 0,
        cat(path, " is not a checkpoint file"));
  const uint32_t version = read_u32(in);
  check(version == kVersion, cat("unsupported checkpoint version ", version));
  uint8_t width = 0;
  in.read(reinterpret_cast<char*>(&width), 1);
  check(width == 4 || width == 8, cat("bad float width flag ", (int)width));
  const Dtype dt = width == 4 ? Dtype::F32 : Dtype::F64;
  const uint32_t count = read_u32(in);

  std::map<std::string, Tensor> out;
  for (uint32_t e = 0; e < count; ++e) {
    const uint32_t name_len = read_u32(in);
    std::string name((size_t)name_len, '\0');
    in.read(name.data(), name_len);
    const uint32_t ndim = read_u32(in);
    Shape shape((size_t)ndim);
    for (uint32_t i = 0; i < ndim; ++i) shape[i] = read_u32(in);
    Tensor t = Tensor::zeros(shape, dt);
    if (dt == Dtype::F32)
      in.read(reinterpret_cast<char*>(t.data<float>()), 4 * (std::streamsize)t.numel());
    else
      in.read(reinterpret_cast<char*>(t.data<double>()), 8 * (std::streamsize)t.numel());
    check(in.good(), cat("truncated checkpoint ", path, " at entry ", name));
    out.emplace(std::move(name), std::move(t));
  }
  return out;
}

void restore_registry(const std::string& path, ParamRegistry& registry) {
  auto entries = load_checkpoint(path);
  auto copy_into = [&](const std::string& name, Tensor dst) {
    auto it = entries.find(name);
    check(it != entries.end(), cat("checkpoint ", path, " missing entry ", name));
    check(it->second.shape() == dst.shape(),
          cat("checkpoint entry ", name, " has shape ", shape_str(it->second.shape()),
              ", expected ", shape_str(dst.shape())));
    for (int64_t i = 0; i < dst.numel(); ++i) dst.set(i, it->second.get(i));
  };
  for (const auto& p : registry.params()) {
    copy_into(p->name, p->value);
    if (entries.count(p->name + ".adam_m")) {
      if (!p->adam_m.defined()) {
        p->adam_m = Tensor::zeros(p->value.shape(), p->value.dtype());
        p->adam_v = Tensor::zeros(p->value.shape(), p->value.dtype());
      }
      copy_into(p->name + ".adam_m", p->adam_m);
      copy_into(p->name + ".adam_v", p->adam_v);
      p->steps = (int64_t)entries.at(p->name + ".adam_t").get(0);
    }
  }
  for (auto& [name, t] : registry.buffers()) copy_into(name, t);
}

}  // namespace mvsr
