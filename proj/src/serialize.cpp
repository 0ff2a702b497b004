#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "soilml/errors.hpp"
#include "soilml/models.hpp"

namespace soilml::models {

ModelKind kind_of(const Model& m) {
  if (std::holds_alternative<LinearModel>(m)) return ModelKind::Linear;
  if (std::holds_alternative<KnnModel>(m)) return ModelKind::Knn;
  if (std::holds_alternative<ForestModel>(m)) return ModelKind::Forest;
  return ModelKind::Mlp;
}

std::string kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Knn: return "knn";
    case ModelKind::Forest: return "forest";
    case ModelKind::Mlp: return "nn";
  }
  throw ValidationError("unknown model kind");
}

ModelKind parse_kind(const std::string& name) {
  if (name == "linear") return ModelKind::Linear;
  if (name == "knn") return ModelKind::Knn;
  if (name == "forest") return ModelKind::Forest;
  if (name == "nn") return ModelKind::Mlp;
  throw ValidationError("unknown model kind '" + name + "'");
}

Eigen::MatrixXd predict(const Model& m, const Eigen::MatrixXd& X) {
  return std::visit([&X](const auto& model) { return model.predict(X); }, m);
}

namespace {

// Hexfloat keeps every bit of the double; '0x' is omitted like to_chars does.
std::string hexd(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  if (ec != std::errc{}) throw ValidationError("serialize: to_chars failed");
  return std::string(buf, ptr);
}

class Writer {
 public:
  void word(std::string_view w) {
    if (col_ > 0) out_ += ' ';
    out_ += w;
    if (++col_ >= 16) newline();
  }
  void integer(long long v) { word(std::to_string(v)); }
  void num(double v) { word(hexd(v)); }
  void newline() {
    if (col_ > 0) out_ += '\n';
    col_ = 0;
  }
  void matrix(const Eigen::MatrixXd& m) {
    integer(m.rows());
    integer(m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) num(m(r, c));
  }
  void vector(const Eigen::VectorXd& v) {
    integer(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) num(v(i));
  }
  std::string take() {
    newline();
    return std::move(out_);
  }

 private:
  std::string out_;
  int col_ = 0;
};

class Reader {
 public:
  Reader(std::string_view text, std::string name) : name_(std::move(name)) {
    std::size_t line_no = 1;
    std::size_t i = 0;
    while (i < text.size()) {
      if (text[i] == '\n') {
        ++line_no;
        ++i;
        continue;
      }
      if (text[i] == ' ' || text[i] == '\t' || text[i] == '\r') {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < text.size() && text[j] != ' ' && text[j] != '\t' &&
             text[j] != '\r' && text[j] != '\n')
        ++j;
      tokens_.emplace_back(text.substr(i, j - i));
      lines_.push_back(line_no);
      i = j;
    }
  }

  std::string_view next() {
    if (at_ >= tokens_.size()) fail("unexpected end of input");
    return tokens_[at_++];
  }

  void expect(std::string_view w) {
    auto t = next();
    if (t != w)
      fail("expected '" + std::string(w) + "', got '" + std::string(t) + "'");
  }

  long long integer() {
    auto t = next();
    long long v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
      fail("bad integer '" + std::string(t) + "'");
    return v;
  }

  double real() {
    auto t = next();
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v,
                                   std::chars_format::hex);
    if (ec != std::errc{} || p != t.data() + t.size())
      fail("bad number '" + std::string(t) + "'");
    return v;
  }

  Eigen::MatrixXd matrix() {
    long long r = integer(), c = integer();
    if (r < 0 || c < 0 || r > 1'000'000 || c > 1'000'000)
      fail("implausible matrix shape");
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = real();
    return m;
  }

  Eigen::VectorXd vector() {
    long long n = integer();
    if (n < 0 || n > 100'000'000) fail("implausible vector length");
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = real();
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = at_ < lines_.size() ? lines_[at_ == 0 ? 0 : at_ - 1]
                                           : (lines_.empty() ? 1 : lines_.back());
    throw ParseError(name_, line, msg);
  }

 private:
  std::string name_;
  std::vector<std::string_view> tokens_;
  std::vector<std::size_t> lines_;
  std::size_t at_ = 0;
};

void write_model(Writer& w, const LinearModel& m) {
  w.word("linear");
  w.matrix(m.W);
  w.vector(m.b.transpose());
}

void write_model(Writer& w, const KnnModel& m) {
  w.word("knn");
  w.integer(m.k);
  w.matrix(m.train_X);
  w.matrix(m.train_Y);
}

void write_model(Writer& w, const ForestModel& m) {
  w.word("forest");
  w.integer(m.config.n_trees);
  w.integer(m.config.bootstrap ? 1 : 0);
  w.integer(m.config.max_depth);
  w.integer(m.config.min_samples_split);
  w.integer(static_cast<long long>(m.trees.size()));
  for (const auto& tree : m.trees) {
    w.newline();
    w.word("tree");
    w.integer(static_cast<long long>(tree.nodes.size()));
    for (const auto& node : tree.nodes) {
      if (node.feature < 0) {
        w.word("l");
        w.vector(node.value.transpose());
      } else {
        w.word("s");
        w.integer(node.feature);
        w.num(node.threshold);
        w.integer(node.left);
        w.integer(node.right);
      }
    }
  }
}

void write_model(Writer& w, const MlpModel& m) {
  w.word("nn");
  w.integer(static_cast<long long>(m.sizes.size()));
  for (int s : m.sizes) w.integer(s);
  w.word(activation_name(m.activation));
  w.vector(m.params);
}

Model read_model(Reader& r) {
  auto kind = r.next();
  if (kind == "linear") {
    LinearModel m;
    m.W = r.matrix();
    m.b = r.vector().transpose();
    if (m.b.size() != m.W.cols()) r.fail("linear: W and b disagree");
    return m;
  }
  if (kind == "knn") {
    KnnModel m;
    long long k = r.integer();
    m.train_X = r.matrix();
    m.train_Y = r.matrix();
    if (k < 1 || k > m.train_X.rows()) r.fail("knn: bad k");
    if (m.train_X.rows() != m.train_Y.rows()) r.fail("knn: row mismatch");
    m.k = static_cast<int>(k);
    return m;
  }
  if (kind == "forest") {
    ForestModel m;
    m.config.n_trees = static_cast<int>(r.integer());
    m.config.bootstrap = r.integer() != 0;
    m.config.max_depth = static_cast<int>(r.integer());
    m.config.min_samples_split = static_cast<int>(r.integer());
    long long n_trees = r.integer();
    if (n_trees < 1 || n_trees > 100'000) r.fail("forest: implausible tree count");
    for (long long t = 0; t < n_trees; ++t) {
      r.expect("tree");
      long long n_nodes = r.integer();
      if (n_nodes < 1 || n_nodes > 10'000'000) r.fail("forest: implausible node count");
      Tree tree;
      tree.nodes.reserve(static_cast<std::size_t>(n_nodes));
      for (long long i = 0; i < n_nodes; ++i) {
        auto tag = r.next();
        TreeNode node;
        if (tag == "l") {
          node.value = r.vector().transpose();
        } else if (tag == "s") {
          node.feature = static_cast<int>(r.integer());
          node.threshold = r.real();
          node.left = static_cast<int>(r.integer());
          node.right = static_cast<int>(r.integer());
          if (node.feature < 0 || node.left < 0 || node.right < 0 ||
              node.left >= n_nodes || node.right >= n_nodes)
            r.fail("forest: bad node wiring");
        } else {
          r.fail("forest: unknown node tag '" + std::string(tag) + "'");
        }
        tree.nodes.push_back(std::move(node));
      }
      m.trees.push_back(std::move(tree));
    }
    return m;
  }
  if (kind == "nn") {
    MlpModel m;
    long long n_sizes = r.integer();
    if (n_sizes < 2 || n_sizes > 1'000) r.fail("nn: implausible layer count");
    for (long long i = 0; i < n_sizes; ++i) {
      long long s = r.integer();
      if (s < 1 || s > 1'000'000) r.fail("nn: implausible layer size");
      m.sizes.push_back(static_cast<int>(s));
    }
    m.activation = parse_activation(std::string(r.next()));
    m.params = r.vector();
    if (m.params.size() != m.n_params()) r.fail("nn: parameter count mismatch");
    return m;
  }
  r.fail("unknown model kind '" + std::string(kind) + "'");
}

}  // namespace

std::string serialize_bundle(const Bundle& b) {
  Writer w;
  w.word("soilml-bundle");
  w.integer(1);
  w.newline();
  w.word("scaler");
  w.vector(b.pipeline.scaler.mean().transpose());
  w.vector(b.pipeline.scaler.sd().transpose());
  w.newline();
  w.word("pca");
  if (b.pipeline.pca) {
    w.word("yes");
    w.vector(b.pipeline.pca->mean().transpose());
    w.vector(b.pipeline.pca->explained_variance());
    w.matrix(b.pipeline.pca->components());
  } else {
    w.word("none");
  }
  w.newline();
  w.word("model");
  std::visit([&w](const auto& m) { write_model(w, m); }, b.model);
  w.newline();
  w.word("end");
  return w.take();
}

Bundle deserialize_bundle(std::string_view text, const std::string& name) {
  Reader r(text, name);
  r.expect("soilml-bundle");
  if (r.integer() != 1) r.fail("unsupported container version");
  r.expect("scaler");
  Eigen::VectorXd mean = r.vector();
  Eigen::VectorXd sd = r.vector();
  if (mean.size() != sd.size()) r.fail("scaler: mean and sd disagree");
  Bundle b;
  b.pipeline.scaler = dataset::StandardScaler::from_moments(mean.transpose(),
                                                            sd.transpose());
  r.expect("pca");
  auto has_pca = r.next();
  if (has_pca == "yes") {
    Eigen::VectorXd pmean = r.vector();
    Eigen::VectorXd variance = r.vector();
    Eigen::MatrixXd components = r.matrix();
    b.pipeline.pca = dataset::Pca::from_parts(pmean.transpose(), components,
                                              variance);
  } else if (has_pca != "none") {
    r.fail("pca: expected 'yes' or 'none'");
  }
  r.expect("model");
  b.model = read_model(r);
  r.expect("end");
  return b;
}

void save_bundle(const std::string& path, const Bundle& b) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << serialize_bundle(b);
  if (!out) throw ValidationError("write failed for " + path);
}

Bundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_bundle(ss.str(), path);
}

}  // namespace soilml::models
