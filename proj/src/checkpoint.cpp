#include "uavmec/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace uavmec {
namespace {

constexpr const char* kMagic = "uavmec-qnetwork";
constexpr int kVersion = 1;

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", v);
  out << buf;
}

double get(std::istream& in) {
  std::string token;
  if (!(in >> token)) throw std::runtime_error("checkpoint: truncated parameter list");
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size())
    throw std::runtime_error("checkpoint: bad number '" + token + "'");
  return v;
}

void expect(std::istream& in, const std::string& word) {
  std::string token;
  if (!(in >> token) || token != word)
    throw std::runtime_error("checkpoint: expected '" + word + "', got '" + token + "'");
}

}  // namespace

void write_checkpoint(std::ostream& out, const QNetwork& net) {
  out << kMagic << ' ' << kVersion << '\n' << "sizes";
  for (auto s : net.sizes()) out << ' ' << s;
  out << '\n';
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    out << "layer " << l << ' ' << layer.in_dim << ' ' << layer.out_dim << '\n';
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      for (std::size_t i = 0; i < layer.in_dim; ++i) {
        if (i) out << ' ';
        put(out, layer.weights[o * layer.in_dim + i]);
      }
      out << '\n';
    }
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      if (o) out << ' ';
      put(out, layer.bias[o]);
    }
    out << '\n';
  }
}

QNetwork read_checkpoint(std::istream& in) {
  expect(in, kMagic);
  int version = 0;
  if (!(in >> version) || version != kVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  expect(in, "sizes");
  std::string line;
  std::getline(in, line);
  std::istringstream sizes_in(line);
  std::vector<std::size_t> sizes;
  for (std::size_t s; sizes_in >> s;) sizes.push_back(s);
  QNetwork net(sizes);
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    auto& layer = net.layers()[l];
    expect(in, "layer");
    std::size_t index = 0, in_dim = 0, out_dim = 0;
    if (!(in >> index >> in_dim >> out_dim) || index != l || in_dim != layer.in_dim ||
        out_dim != layer.out_dim)
      throw std::runtime_error("checkpoint: layer header does not match sizes");
    for (double& w : layer.weights) w = get(in);
    for (double& b : layer.bias) b = get(in);
  }
  return net;
}

void save_checkpoint(const std::string& path, const QNetwork& net) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  write_checkpoint(out, net);
  if (!out) throw std::runtime_error("error while writing checkpoint '" + path + "'");
}

QNetwork load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing checkpoint '" + path + "'");
  return read_checkpoint(in);
}

}  // namespace uavmec
