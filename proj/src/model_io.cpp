#include "unisvm/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace unisvm {

static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'U', 'S', 'V', 'M'};
constexpr std::uint32_t kVersion = 1;
constexpr const char* kTextHeader = "unisvm-model-text";

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value))
    throw InputError("truncated model file");
  return value;
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto n = get<std::uint32_t>(in);
  std::string s(n, '\0');
  if (!in.read(s.data(), n)) throw InputError("truncated model file");
  return s;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_binary(const Model& model, std::ostream& out) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint8_t>(out, model.task == Task::Classification ? 0 : 1);
  put<std::uint8_t>(out, 0);  // kernel kind: gaussian
  put<double>(out, model.kernel.gamma);
  put<double>(out, model.lambda);
  put<double>(out, model.A);
  put_string(out, model.loss);
  put<std::uint64_t>(out, model.support_points.size());
  for (const SparseVector& x : model.support_points) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(x.nnz()));
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(x.idx[k]));
      put<double>(out, x.val[k]);
    }
  }
  for (Eigen::Index i = 0; i < model.coefficients.size(); ++i)
    put<double>(out, model.coefficients[i]);
}

Model read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw InputError("not a model file (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion)
    throw InputError("unsupported model version " + std::to_string(version));
  Model model;
  model.task = get<std::uint8_t>(in) == 0 ? Task::Classification
                                          : Task::Regression;
  const auto kind = get<std::uint8_t>(in);
  if (kind != 0) throw InputError("unsupported kernel kind in model file");
  model.kernel.gamma = get<double>(in);
  model.lambda = get<double>(in);
  model.A = get<double>(in);
  model.loss = get_string(in);
  const auto n = get<std::uint64_t>(in);
  model.support_points.resize(n);
  for (auto& x : model.support_points) {
    const auto nnz = get<std::uint32_t>(in);
    x.idx.resize(nnz);
    x.val.resize(nnz);
    for (std::uint32_t k = 0; k < nnz; ++k) {
      x.idx[k] = static_cast<int>(get<std::uint32_t>(in));
      x.val[k] = get<double>(in);
    }
  }
  model.coefficients.resize(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i)
    model.coefficients[static_cast<Eigen::Index>(i)] = get<double>(in);
  return model;
}

void write_text(const Model& model, std::ostream& out) {
  out << kTextHeader << ' ' << kVersion << '\n';
  out << "task " << (model.task == Task::Classification ? "class" : "reg")
      << '\n';
  out << "kernel gaussian gamma " << fmt(model.kernel.gamma) << '\n';
  out << "loss " << model.loss << '\n';
  out << "lambda " << fmt(model.lambda) << '\n';
  out << "A " << fmt(model.A) << '\n';
  out << "support " << model.support_points.size() << '\n';
  for (std::size_t i = 0; i < model.support_points.size(); ++i) {
    out << fmt(model.coefficients[static_cast<Eigen::Index>(i)]);
    const SparseVector& x = model.support_points[i];
    for (std::size_t k = 0; k < x.nnz(); ++k)
      out << ' ' << x.idx[k] << ':' << fmt(x.val[k]);
    out << '\n';
  }
}

Model read_text(std::istream& in) {
  std::string header;
  std::uint32_t version = 0;
  if (!(in >> header >> version) || header != kTextHeader ||
      version != kVersion)
    throw InputError("not a text model file");
  Model model;
  std::string key;
  while (in >> key) {
    if (key == "task") {
      std::string t;
      in >> t;
      if (t != "class" && t != "reg") throw InputError("bad task in model");
      model.task = t == "class" ? Task::Classification : Task::Regression;
    } else if (key == "kernel") {
      std::string kind, gkey;
      in >> kind >> gkey >> model.kernel.gamma;
      if (kind != "gaussian" || gkey != "gamma")
        throw InputError("bad kernel line in model");
    } else if (key == "loss") {
      in >> model.loss;
    } else if (key == "lambda") {
      in >> model.lambda;
    } else if (key == "A") {
      in >> model.A;
    } else if (key == "support") {
      std::size_t n = 0;
      in >> n;
      in.ignore();  // trailing newline
      model.support_points.resize(n);
      model.coefficients.resize(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        std::string line;
        if (!std::getline(in, line))
          throw InputError("truncated text model file");
        std::istringstream ls(line);
        if (!(ls >> model.coefficients[static_cast<Eigen::Index>(i)]))
          throw InputError("bad coefficient line in model");
        std::string tok;
        SparseVector& x = model.support_points[i];
        while (ls >> tok) {
          const auto colon = tok.find(':');
          if (colon == std::string::npos)
            throw InputError("bad support token '" + tok + "'");
          x.push(std::stoi(tok.substr(0, colon)),
                 std::stod(tok.substr(colon + 1)));
        }
      }
      break;  // support block is last
    } else {
      throw InputError("unknown model key '" + key + "'");
    }
  }
  if (model.support_points.empty())
    throw InputError("text model has no support block");
  return model;
}

}  // namespace

void write_model(const Model& model, std::ostream& out, bool text_format) {
  if (model.support_points.size() !=
      static_cast<std::size_t>(model.coefficients.size()))
    throw InputError("model support/coefficient count mismatch");
  if (model.support_points.empty()) throw InputError("model is empty");
  if (text_format)
    write_text(model, out);
  else
    write_binary(model, out);
}

Model read_model(std::istream& in) {
  const int first = in.peek();
  Model model = first == 'U' ? read_binary(in) : read_text(in);
  if (model.support_points.size() !=
      static_cast<std::size_t>(model.coefficients.size()))
    throw InputError("model support/coefficient count mismatch");
  return model;
}

void save_model(const Model& model, const std::string& path, bool text_format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_model(model, out, text_format);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_model(in);
}

}  // namespace unisvm
