#include "depsrl/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace depsrl::model {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

using nlohmann::json;

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in, const char* what) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value))
    throw CheckpointError(std::string("truncated checkpoint while reading ") + what);
  return value;
}

std::string get_bytes(std::istream& in, std::size_t n, const char* what) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n)))
    throw CheckpointError(std::string("truncated checkpoint while reading ") + what);
  return s;
}

}  // namespace

void save_checkpoint(const JointParser& model, std::ostream& out) {
  const auto& v = model.vocab();
  json header;
  header["config_version"] = kConfigVersion;
  header["config"] = json::parse(config_to_json(model.config()));
  header["vocab"] = {{"words", v.words.items()}, {"syn", v.syn.items()}, {"d", v.d.items()},
                     {"c", v.c.items()},         {"r", v.r.items()}};
  const std::string blob = header.dump();

  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, blob.size());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.params().size()));
  for (const auto& p : model.params()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.cols()));
    out.write(reinterpret_cast<const char*>(p.value.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(p.value.size())));
  }
  if (!out) throw CheckpointError("failed to write checkpoint");
}

void save_checkpoint(const JointParser& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open '" + path + "' for writing");
  save_checkpoint(model, out);
}

JointParser load_checkpoint(std::istream& in) {
  char magic[sizeof kCheckpointMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw CheckpointError("not a depsrl checkpoint (bad magic)");
  const auto version = get<std::uint32_t>(in, "format version");
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint format version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  const auto blob_size = get<std::uint64_t>(in, "header size");
  if (blob_size > (std::uint64_t{1} << 32)) throw CheckpointError("implausible checkpoint header size");
  const std::string blob = get_bytes(in, static_cast<std::size_t>(blob_size), "header");

  json header;
  try {
    header = json::parse(blob);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }
  if (!header.contains("config_version") || header.at("config_version") != kConfigVersion)
    throw CheckpointError("checkpoint config_version " +
                          (header.contains("config_version") ? header.at("config_version").dump() : "<missing>") +
                          " does not match this build (" + std::to_string(kConfigVersion) + ")");

  ModelConfig config;
  ModelVocab vocab;
  try {
    config = config_from_json(header.at("config").dump());
    const auto& jv = header.at("vocab");
    vocab.words = Vocabulary(jv.at("words").get<std::vector<std::string>>());
    vocab.syn = Vocabulary(jv.at("syn").get<std::vector<std::string>>());
    vocab.d = Vocabulary(jv.at("d").get<std::vector<std::string>>());
    vocab.c = Vocabulary(jv.at("c").get<std::vector<std::string>>());
    vocab.r = Vocabulary(jv.at("r").get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config rejected: ") + e.what());
  }

  JointParser model(config, vocab);
  auto& params = model.params();
  const auto count = get<std::uint32_t>(in, "tensor count");
  if (static_cast<int>(count) != params.size())
    throw CheckpointError("checkpoint has " + std::to_string(count) + " tensors, model expects " +
                          std::to_string(params.size()));
  std::vector<bool> seen(static_cast<std::size_t>(params.size()), false);
  for (std::uint32_t t = 0; t < count; ++t) {
    const auto len = get<std::uint32_t>(in, "tensor name length");
    if (len > 4096) throw CheckpointError("implausible tensor name length");
    const std::string name = get_bytes(in, len, "tensor name");
    const auto rows = get<std::uint32_t>(in, "tensor rows");
    const auto cols = get<std::uint32_t>(in, "tensor cols");
    const int id = params.find(name);
    if (id < 0) throw CheckpointError("unexpected tensor '" + name + "'");
    auto& value = params[id].value;
    if (rows != value.rows() || cols != value.cols())
      throw CheckpointError("tensor '" + name + "' has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                            ", expected " + std::to_string(value.rows()) + "x" + std::to_string(value.cols()));
    if (!in.read(reinterpret_cast<char*>(value.data()),
                 static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(value.size()))))
      throw CheckpointError("truncated checkpoint in tensor '" + name + "'");
    seen[static_cast<std::size_t>(id)] = true;
  }
  for (int i = 0; i < params.size(); ++i)
    if (!seen[static_cast<std::size_t>(i)]) throw CheckpointError("missing tensor '" + params[i].name + "'");
  return model;
}

JointParser load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  return load_checkpoint(in);
}

}  // namespace depsrl::model
