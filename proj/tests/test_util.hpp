#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/error.hpp"
#include "qgraph/graph.hpp"

namespace qgraph::test {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline MarkedGraph corpus_graph(const std::string& name) {
  return parse_graph(read_file(std::filesystem::path(QGRAPH_TEST_DATA) / "corpus" / (name + ".graph")));
}

inline std::vector<std::pair<std::string, MarkedGraph>> corpus() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(std::filesystem::path(QGRAPH_TEST_DATA) / "corpus")) {
    if (entry.path().extension() == ".graph") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, MarkedGraph>> out;
  for (const auto& f : files) out.emplace_back(f.stem().string(), parse_graph(read_file(f)));
  return out;
}

/// Small rational couplings p/q with |p| <= 5, q in 1..4; zero with probability ~1/8.
inline CouplingVector random_couplings(const MarkedGraph& g, std::mt19937_64& rng, bool allow_zero = true) {
  std::uniform_int_distribution<int> num(-5, 5);
  std::uniform_int_distribution<int> den(1, 4);
  std::uniform_int_distribution<int> zero(0, 7);
  std::vector<Rational> v;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    Rational r;
    do {
      r = Rational(num(rng), den(rng));
      r.canonicalize();
    } while (r == 0 && !allow_zero);
    if (allow_zero && zero(rng) == 0) r = 0;
    v.push_back(r);
  }
  return CouplingVector::from_values(g, v);
}

/// Random connected multigraph: a random spanning tree plus extra edges and loops.
inline MarkedGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t extra_edges, std::size_t loops,
                                int forced_types = -1) {
  GraphBuilder b;
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_real_distribution<double> len(0.5, 2.5);
  for (std::size_t i = 0; i < n; ++i) {
    const int t = forced_types >= 0 ? forced_types : coin(rng);
    b.add_vertex("V" + std::to_string(i + 1), t == 0 ? VertexType::Delta : VertexType::DeltaPrime);
  }
  std::size_t e = 0;
  auto add = [&](std::size_t u, std::size_t v) {
    ++e;
    b.add_edge("e" + std::to_string(e), "V" + std::to_string(u + 1), "V" + std::to_string(v + 1), len(rng));
  };
  for (std::size_t i = 1; i < n; ++i) add(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng), i);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t k = 0; k < extra_edges && n > 1; ++k) {
    std::size_t u = pick(rng), v = pick(rng);
    while (v == u) v = pick(rng);
    add(u, v);
  }
  for (std::size_t k = 0; k < loops; ++k) {
    const std::size_t u = pick(rng);
    add(u, u);
  }
  return b.build();
}

template <typename F>
std::optional<ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Random graph whose non-loop edges all join a delta and a delta' vertex.
/// Lengths are square roots of distinct primes over 2, so they are
/// rationally independent.
inline MarkedGraph random_mixed_graph(std::mt19937_64& rng, std::size_t n, std::size_t extra_edges,
                                      std::size_t loops = 0) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  std::vector<int> pool(std::begin(primes), std::end(primes));
  std::shuffle(pool.begin(), pool.end(), rng);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<VertexType> types(n);
  types[0] = coin(rng) ? VertexType::Delta : VertexType::DeltaPrime;
  types[1] = types[0] == VertexType::Delta ? VertexType::DeltaPrime : VertexType::Delta;
  for (std::size_t i = 2; i < n; ++i) types[i] = coin(rng) ? VertexType::Delta : VertexType::DeltaPrime;

  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_vertex("V" + std::to_string(i + 1), types[i]);
  std::size_t e = 0;
  auto add = [&](std::size_t u, std::size_t v) {
    const int p = pool.at(e++);
    b.add_edge("e" + std::to_string(e), "V" + std::to_string(u + 1), "V" + std::to_string(v + 1),
               std::sqrt(p / 4.0), "sqrt(" + std::to_string(p) + "/4)");
  };
  auto partner = [&](std::size_t i, std::size_t below) -> std::optional<std::size_t> {
    std::vector<std::size_t> c;
    for (std::size_t j = 0; j < below; ++j) {
      if (j != i && types[j] != types[i]) c.push_back(j);
    }
    if (c.empty()) return std::nullopt;
    return c[std::uniform_int_distribution<std::size_t>(0, c.size() - 1)(rng)];
  };
  add(0, 1);
  for (std::size_t i = 2; i < n; ++i) add(*partner(i, i), i);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t k = 0; k < extra_edges; ++k) {
    const auto u = pick(rng);
    add(u, *partner(u, n));
  }
  for (std::size_t k = 0; k < loops; ++k) {
    const auto u = pick(rng);
    add(u, u);
  }
  return b.build();
}

}  // namespace qgraph::test
