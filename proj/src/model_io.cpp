#include "semfun/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace semfun {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kModelMagic[4] = {'S', 'F', 'N', 'M'};
constexpr char kStateMagic[4] = {'S', 'F', 'S', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "binary model files are little-endian; add byte swapping for this platform");

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path)
      : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw DataError("cannot open file for writing: " + path.string());
  }

  void magic(const char (&m)[4]) { out_.write(m, 4); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }

  void string(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }

  void doubles(const double* data, std::size_t count) {
    u64(count);
    raw(data, count * sizeof(double));
  }

  void vector(const Vector& v) { doubles(v.data(), static_cast<std::size_t>(v.size())); }

  void matrix_row_major(const Matrix& m) {
    u64(static_cast<std::uint64_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
    }
  }

  void close() {
    out_.close();
    if (!out_) throw DataError("failed writing: " + path_.string());
  }

 private:
  void raw(const void* data, std::size_t size) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  }

  std::ofstream out_;
  std::filesystem::path path_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path)
      : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw DataError("cannot open file: " + path.string());
  }

  void expect_magic(const char (&m)[4], const char* what) {
    char buf[4];
    raw(buf, 4);
    if (std::memcmp(buf, m, 4) != 0) {
      throw DataError(std::string("not a ") + what + " file: " + path_.string());
    }
  }

  std::uint32_t u32() { return read<std::uint32_t>(); }
  std::uint64_t u64() { return read<std::uint64_t>(); }
  std::int64_t i64() { return read<std::int64_t>(); }
  double f64() { return read<double>(); }

  std::string string() {
    auto len = u64();
    if (len > (1ULL << 32)) throw DataError("corrupt string length in " + path_.string());
    std::string s(len, '\0');
    raw(s.data(), len);
    return s;
  }

  Vector vector(std::uint64_t expected) {
    auto count = u64();
    if (count != expected) throw DataError("array length mismatch in " + path_.string());
    Vector v(static_cast<Eigen::Index>(count));
    raw(v.data(), count * sizeof(double));
    return v;
  }

  Matrix matrix_row_major(Eigen::Index rows, Eigen::Index cols) {
    auto count = u64();
    if (count != static_cast<std::uint64_t>(rows * cols)) {
      throw DataError("matrix size mismatch in " + path_.string());
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = f64();
    }
    return m;
  }

 private:
  template <typename T>
  T read() {
    T v;
    raw(&v, sizeof v);
    return v;
  }

  void raw(void* data, std::size_t size) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (!in_) throw DataError("unexpected end of file: " + path_.string());
  }

  std::ifstream in_;
  std::filesystem::path path_;
};

std::vector<double> matrix_rows(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  }
  return flat;
}

Vocabulary vocab_from_json(const ordered_json& j) {
  std::vector<std::pair<std::string, std::int64_t>> counts;
  for (const auto& entry : j) {
    counts.emplace_back(entry.at(0).get<std::string>(), entry.at(1).get<std::int64_t>());
  }
  return Vocabulary::from_counts(std::move(counts));
}

}  // namespace

void save_model_json(const Model& model, const std::filesystem::path& path) {
  model.validate();
  ordered_json j;
  j["format"] = "semfun-model";
  j["version"] = kFormatVersion;
  j["space"] = {{"n_dims", model.n_dims()}, {"cardinality", model.cardinality()}};
  j["labels"] = model.labels.names();
  auto vocab = ordered_json::array();
  for (int c = 0; c < model.n_preds(); ++c) {
    vocab.push_back(ordered_json::array({model.vocab.word(c), model.vocab.count(c)}));
  }
  j["vocabulary"] = std::move(vocab);
  j["dim_bias"] = std::vector<double>(model.dim_bias.data(),
                                      model.dim_bias.data() + model.dim_bias.size());
  auto links = ordered_json::array();
  for (const auto& w : model.link_w) links.push_back(matrix_rows(w));
  j["link_weights"] = std::move(links);
  auto preds = ordered_json::array();
  for (int c = 0; c < model.n_preds(); ++c) {
    preds.push_back(std::vector<double>(model.pred_w.col(c).data(),
                                        model.pred_w.col(c).data() + model.n_dims()));
  }
  j["pred_weights"] = std::move(preds);
  j["pred_bias"] =
      std::vector<double>(model.pred_b.data(), model.pred_b.data() + model.pred_b.size());

  std::ofstream out(path);
  if (!out) throw DataError("cannot open file for writing: " + path.string());
  out << j.dump(1, '\t') << '\n';
  if (!out) throw DataError("failed writing: " + path.string());
}

Model load_model_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad model JSON in " + path.string() + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "semfun-model") {
      throw DataError("not a model file: " + path.string());
    }
    if (j.at("version").get<std::uint32_t>() != kFormatVersion) {
      throw DataError("unsupported model version in " + path.string());
    }
    SpaceConfig space{j.at("space").at("n_dims").get<int>(),
                      j.at("space").at("cardinality").get<int>()};
    LabelTable labels;
    for (const auto& name : j.at("labels")) labels.add(name.get<std::string>());
    Model m = Model::zeros(space, labels, vocab_from_json(j.at("vocabulary")));

    const auto& bias = j.at("dim_bias");
    if (static_cast<int>(bias.size()) != space.n_dims) throw DataError("dim_bias length mismatch");
    for (int i = 0; i < space.n_dims; ++i) m.dim_bias[i] = bias[i].get<double>();

    const auto& links = j.at("link_weights");
    if (static_cast<int>(links.size()) != labels.size()) {
      throw DataError("link_weights count mismatch");
    }
    for (int l = 0; l < labels.size(); ++l) {
      const auto& flat = links[l];
      if (static_cast<int>(flat.size()) != space.n_dims * space.n_dims) {
        throw DataError("link weight matrix size mismatch");
      }
      for (int i = 0; i < space.n_dims; ++i) {
        for (int k = 0; k < space.n_dims; ++k) {
          m.link_w[l](i, k) = flat[i * space.n_dims + k].get<double>();
        }
      }
    }

    const auto& preds = j.at("pred_weights");
    if (static_cast<int>(preds.size()) != m.n_preds()) throw DataError("pred_weights count mismatch");
    for (int c = 0; c < m.n_preds(); ++c) {
      const auto& col = preds[c];
      if (static_cast<int>(col.size()) != space.n_dims) throw DataError("pred weight length mismatch");
      for (int i = 0; i < space.n_dims; ++i) m.pred_w(i, c) = col[i].get<double>();
    }
    const auto& pb = j.at("pred_bias");
    if (static_cast<int>(pb.size()) != m.n_preds()) throw DataError("pred_bias length mismatch");
    for (int c = 0; c < m.n_preds(); ++c) m.pred_b[c] = pb[c].get<double>();

    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad model JSON in " + path.string() + ": " + e.what());
  }
}

void save_model_binary(const Model& model, const std::filesystem::path& path) {
  model.validate();
  BinaryWriter w(path);
  w.magic(kModelMagic);
  w.u32(kFormatVersion);
  w.u64(static_cast<std::uint64_t>(model.n_dims()));
  w.u64(static_cast<std::uint64_t>(model.cardinality()));
  w.u64(static_cast<std::uint64_t>(model.n_labels()));
  for (const auto& name : model.labels.names()) w.string(name);
  w.u64(static_cast<std::uint64_t>(model.n_preds()));
  for (int c = 0; c < model.n_preds(); ++c) {
    w.string(model.vocab.word(c));
    w.i64(model.vocab.count(c));
  }
  w.vector(model.dim_bias);
  for (const auto& mat : model.link_w) w.matrix_row_major(mat);
  for (int c = 0; c < model.n_preds(); ++c) {
    w.doubles(model.pred_w.col(c).data(), static_cast<std::size_t>(model.n_dims()));
  }
  w.vector(model.pred_b);
  w.close();
}

Model load_model_binary(const std::filesystem::path& path) {
  BinaryReader r(path);
  r.expect_magic(kModelMagic, "model");
  if (r.u32() != kFormatVersion) throw DataError("unsupported model version in " + path.string());
  SpaceConfig space{};
  space.n_dims = static_cast<int>(r.u64());
  space.cardinality = static_cast<int>(r.u64());
  auto n_labels = r.u64();
  LabelTable labels;
  for (std::uint64_t l = 0; l < n_labels; ++l) labels.add(r.string());
  auto n_preds = r.u64();
  std::vector<std::pair<std::string, std::int64_t>> counts;
  counts.reserve(n_preds);
  for (std::uint64_t c = 0; c < n_preds; ++c) {
    std::string word = r.string();
    std::int64_t count = r.i64();
    counts.emplace_back(std::move(word), count);
  }
  Model m = Model::zeros(space, labels, Vocabulary::from_counts(std::move(counts)));
  m.dim_bias = r.vector(static_cast<std::uint64_t>(space.n_dims));
  for (int l = 0; l < m.n_labels(); ++l) {
    m.link_w[l] = r.matrix_row_major(space.n_dims, space.n_dims);
  }
  for (int c = 0; c < m.n_preds(); ++c) {
    m.pred_w.col(c) = r.vector(static_cast<std::uint64_t>(space.n_dims));
  }
  m.pred_b = r.vector(n_preds);
  m.validate();
  return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    save_model_json(model, path);
  } else {
    save_model_binary(model, path);
  }
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  char first = 0;
  in.get(first);
  in.close();
  if (first == '{') return load_model_json(path);
  return load_model_binary(path);
}

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& model_path) {
  auto p = model_path;
  p += ".state";
  return p;
}

std::uint64_t fnv1a(const unsigned char* data, std::size_t size, std::uint64_t h) {
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t latent_digest(const std::vector<LatentState>& latents) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_int = [&h](std::int64_t v) {
    h = fnv1a(reinterpret_cast<const unsigned char*>(&v), sizeof v, h);
  };
  mix_int(static_cast<std::int64_t>(latents.size()));
  for (const auto& latent : latents) {
    mix_int(static_cast<std::int64_t>(latent.entities.size()));
    for (const auto& e : latent.entities) {
      for (int d : e.active) mix_int(d);
    }
    for (auto p : latent.neg_predicates) mix_int(p);
  }
  return h;
}

void write_entity(BinaryWriter& w, const EntityVector& e) {
  w.u64(e.active.size());
  for (int d : e.active) w.i64(d);
}

EntityVector read_entity(BinaryReader& r, int n_dims) {
  auto c = r.u64();
  EntityVector e;
  e.active.reserve(c);
  int prev = -1;
  for (std::uint64_t i = 0; i < c; ++i) {
    int d = static_cast<int>(r.i64());
    if (d <= prev || d >= n_dims) throw DataError("corrupt entity vector in checkpoint");
    e.active.push_back(d);
    prev = d;
  }
  return e;
}

void write_tensors(BinaryWriter& w, const ParamTensors& t) {
  w.u64(t.link_w.size());
  for (const auto& m : t.link_w) w.matrix_row_major(m);
  w.vector(t.dim_bias);
  w.matrix_row_major(t.pred_w);
  w.vector(t.pred_b);
}

ParamTensors read_tensors(BinaryReader& r, const Model& model) {
  ParamTensors t;
  auto n_links = r.u64();
  if (n_links != static_cast<std::uint64_t>(model.n_labels())) {
    throw DataError("checkpoint does not match model (link count)");
  }
  for (std::uint64_t l = 0; l < n_links; ++l) {
    t.link_w.push_back(r.matrix_row_major(model.n_dims(), model.n_dims()));
  }
  t.dim_bias = r.vector(static_cast<std::uint64_t>(model.n_dims()));
  t.pred_w = r.matrix_row_major(model.n_dims(), model.n_preds());
  t.pred_b = r.vector(static_cast<std::uint64_t>(model.n_preds()));
  return t;
}

void write_hyperparams(BinaryWriter& w, const Hyperparams& hp) {
  w.i64(hp.n_dims);
  w.i64(hp.cardinality);
  w.f64(hp.learning_rate);
  w.f64(hp.adagrad_decay);
  w.f64(hp.adagrad_epsilon);
  w.f64(hp.l1);
  w.f64(hp.l2);
  w.i64(hp.batch_size);
  w.i64(hp.n_particles);
  w.i64(hp.particle_sweeps_per_batch);
  w.i64(hp.steps_per_variable);
  w.f64(hp.z_ratio_k);
  w.i64(hp.epochs);
  w.u64(hp.seed);
  // threads is execution configuration, not model state; it is not stored.
  w.i64(hp.zx_mode == ZxMode::kExact ? 1 : 0);
}

Hyperparams read_hyperparams(BinaryReader& r) {
  Hyperparams hp;
  hp.n_dims = static_cast<int>(r.i64());
  hp.cardinality = static_cast<int>(r.i64());
  hp.learning_rate = r.f64();
  hp.adagrad_decay = r.f64();
  hp.adagrad_epsilon = r.f64();
  hp.l1 = r.f64();
  hp.l2 = r.f64();
  hp.batch_size = static_cast<int>(r.i64());
  hp.n_particles = static_cast<int>(r.i64());
  hp.particle_sweeps_per_batch = static_cast<int>(r.i64());
  hp.steps_per_variable = static_cast<int>(r.i64());
  hp.z_ratio_k = r.f64();
  hp.epochs = static_cast<int>(r.i64());
  hp.seed = r.u64();
  hp.zx_mode = r.i64() ? ZxMode::kExact : ZxMode::kApprox;
  return hp;
}

}  // namespace

void save_checkpoint(const TrainState& state, const std::filesystem::path& model_path) {
  save_model_binary(state.model, model_path);
  BinaryWriter w(sidecar_path(model_path));
  w.magic(kStateMagic);
  w.u32(kFormatVersion);
  write_hyperparams(w, state.hp);
  w.i64(state.epochs_done);
  w.u64(state.corpus_digest);
  w.i64(state.n_tokens);
  write_tensors(w, state.adagrad);
  w.u64(state.particles.size());
  for (const auto& particle : state.particles) {
    w.u64(particle.entities.size());
    for (const auto& e : particle.entities) write_entity(w, e);
    w.u64(particle.links.size());
    for (const auto& l : particle.links) {
      w.i64(l.src);
      w.i64(l.label);
      w.i64(l.tgt);
    }
  }
  w.u64(state.latents.size());
  for (const auto& latent : state.latents) {
    w.u64(latent.entities.size());
    for (const auto& e : latent.entities) write_entity(w, e);
    for (auto p : latent.neg_predicates) w.i64(p);
  }
  w.u64(latent_digest(state.latents));
  w.close();
}

TrainState load_checkpoint(const std::filesystem::path& model_path) {
  TrainState state;
  state.model = load_model_binary(model_path);
  BinaryReader r(sidecar_path(model_path));
  r.expect_magic(kStateMagic, "checkpoint state");
  if (r.u32() != kFormatVersion) {
    throw DataError("unsupported checkpoint version in " + sidecar_path(model_path).string());
  }
  state.hp = read_hyperparams(r);
  state.epochs_done = r.i64();
  state.corpus_digest = r.u64();
  state.n_tokens = r.i64();
  state.adagrad = read_tensors(r, state.model);
  auto n_particles = r.u64();
  state.particles.resize(n_particles);
  for (auto& particle : state.particles) {
    auto n_entities = r.u64();
    for (std::uint64_t e = 0; e < n_entities; ++e) {
      particle.entities.push_back(read_entity(r, state.model.n_dims()));
    }
    auto n_links = r.u64();
    for (std::uint64_t l = 0; l < n_links; ++l) {
      Link link;
      link.src = static_cast<int>(r.i64());
      link.label = static_cast<LinkLabelId>(r.i64());
      link.tgt = static_cast<int>(r.i64());
      particle.links.push_back(link);
    }
  }
  auto n_latents = r.u64();
  state.latents.resize(n_latents);
  for (auto& latent : state.latents) {
    auto n_entities = r.u64();
    for (std::uint64_t e = 0; e < n_entities; ++e) {
      latent.entities.push_back(read_entity(r, state.model.n_dims()));
    }
    for (std::uint64_t e = 0; e < n_entities; ++e) {
      latent.neg_predicates.push_back(static_cast<PredicateId>(r.i64()));
    }
  }
  if (r.u64() != latent_digest(state.latents)) {
    throw DataError("checkpoint latent-state digest mismatch: " +
                    sidecar_path(model_path).string());
  }
  return state;
}

}  // namespace semfun
