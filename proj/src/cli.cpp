#include "qgraph/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qgraph/json_io.hpp"

namespace qgraph::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream o(path);
  if (!o) throw UsageError("cannot write '" + path + "'");
  o << text;
}

MarkedGraph load_graph(const std::string& path) { return parse_graph(slurp(path)); }

CouplingVector load_couplings(const std::string& path, const MarkedGraph& g) {
  return parse_couplings(slurp(path), g);
}

void warn_relations(const MarkedGraph& g, std::ostream& err) {
  if (g.edge_count() > 12) return;
  const auto rel = rational_independence_heuristic(g, g.edge_count() <= 8 ? 2 : 1);
  if (!rel.empty()) {
    err << "warning: edge lengths satisfy " << rel.size()
        << " small integer relation(s); symbolic results assume independent lengths\n";
  }
}

void print_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

struct Options {
  std::string graph;
  std::vector<std::string> couplings;
  double lmin = 0.0;
  bool lmin_set = false;
  double lmax = 100.0;
  std::string method;
  std::string format = "csv";
  std::size_t points = 1000;
  double mu_step = 0.0;
  double rel_tol = 1e-12;
  bool relaxed = false;
  std::string vertex;
  std::string edge;
  std::string direction;
  std::string graph_out;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  std::size_t starts = 48;
  std::int64_t max_denominator = 1000000;
};

int cmd_spectrum(const Options& o, std::ostream& out, std::ostream&) {
  const auto g = load_graph(o.graph);
  const auto a = load_couplings(o.couplings.at(0), g);
  double lmin = o.lmin;
  if (!o.lmin_set) {
    const double b = negative_spectrum_bound(g, a);
    lmin = -b * b;
  }
  if (!(lmin < o.lmax)) throw UsageError("--lmin must be below --lmax");
  SpectrumOptions opts;
  opts.mu_step = o.mu_step;
  opts.rel_tol = o.rel_tol;
  opts.threads = o.threads;
  const auto w = o.method == "edge-basis" ? eigenvalues_edge_basis(g, a, lmin, o.lmax, opts)
                                          : eigenvalues_secular(g, a, lmin, o.lmax, opts);
  if (o.format == "json") {
    print_json(out, spectrum_json(w));
    return 0;
  }
  out << "lambda,multiplicity,flag\n";
  for (const auto& r : w.roots) out << fmt(r.lambda) << ',' << r.multiplicity << ',' << to_string(r.flag) << '\n';
  return 0;
}

int cmd_secular(const Options& o, std::ostream& out, std::ostream&) {
  const auto g = load_graph(o.graph);
  const auto a = load_couplings(o.couplings.at(0), g);
  const double lmin = o.lmin_set ? o.lmin : 0.1;
  if (!(lmin < o.lmax)) throw UsageError("--lmin must be below --lmax");
  if (o.points < 2) throw UsageError("--points must be at least 2");
  const SecularFunction f(g, expand_subgraphs(g), a);
  out << "lambda,value\n";
  for (std::size_t i = 0; i < o.points; ++i) {
    const double x = lmin + (o.lmax - lmin) * double(i) / double(o.points - 1);
    out << fmt(x) << ',' << fmt(f(x)) << '\n';
  }
  return 0;
}

int cmd_expand(const Options& o, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(o.graph);
  warn_relations(g, err);
  const auto e = o.method == "permutation" ? expand_permutation(g) : expand_subgraphs(g);
  print_json(out, expansion_json(e));
  return 0;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream&) {
  const auto g = load_graph(o.graph);
  const auto a = load_couplings(o.couplings.at(0), g);
  const auto b = load_couplings(o.couplings.at(1), g);
  const auto v = o.relaxed ? check_isospectral_relaxed(g, a, b) : check_isospectral(g, a, b);
  print_json(out, verdict_json(v));
  switch (v.verdict) {
    case Verdict::Isospectral: return kExitIsospectral;
    case Verdict::NotIsospectral: return kExitNotIsospectral;
    case Verdict::Unsupported: return kExitUnsupported;
  }
  return kExitUnsupported;
}

int cmd_sigma(const Options& o, std::ostream& out, std::ostream&) {
  const auto g = load_graph(o.graph);
  print_json(out, sigma_json(g, load_couplings(o.couplings.at(0), g), load_couplings(o.couplings.at(1), g)));
  return 0;
}

int cmd_balance(const Options& o, std::ostream& out, std::ostream&) {
  const auto g = load_graph(o.graph);
  const auto a = load_couplings(o.couplings.at(0), g);
  const auto b = load_couplings(o.couplings.at(1), g);
  Json rows = Json::array();
  if (!o.vertex.empty()) {
    rows.push_back(balance_json(o.vertex, balancing_residual(g, o.vertex, a, b)));
  } else {
    for (const auto& v : g.vertices()) {
      try {
        rows.push_back(balance_json(v.id, balancing_residual(g, v.id, a, b)));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroAdjacentCoupling) throw;
      }
    }
  }
  print_json(out, {{"vertices", rows}});
  return 0;
}

int emit_reduction(const Options& o, const ReductionResult& r, const CouplingVector* a, const CouplingVector* b,
                   std::ostream& out) {
  if (!o.graph_out.empty()) spill(o.graph_out, serialize_graph(r.graph));
  print_json(out, reduction_json(r, a, b));
  return 0;
}

int cmd_trim(const Options& o, std::ostream& out, std::ostream&) {
  if (o.edge.empty() == o.vertex.empty()) throw UsageError("trim needs exactly one of --edge or --vertex");
  const auto g = load_graph(o.graph);
  std::vector<CouplingVector> cs;
  for (const auto& p : o.couplings) cs.push_back(load_couplings(p, g));
  const auto r = o.edge.empty() ? trim_loop_vertex(g, o.vertex) : trim_same_type_edge(g, o.edge);
  return emit_reduction(o, r, cs.size() > 0 ? &cs[0] : nullptr, cs.size() > 1 ? &cs[1] : nullptr, out);
}

int cmd_clean(const Options& o, std::ostream& out, std::ostream&) {
  const auto g = load_graph(o.graph);
  const auto a = load_couplings(o.couplings.at(0), g);
  const auto b = load_couplings(o.couplings.at(1), g);
  if (a.at(o.vertex) != 0 || b.at(o.vertex) != 0) {
    throw Error(ErrorCode::VertexNotDoublyZero, "vertex '" + o.vertex + "' must have zero coupling in both vectors");
  }
  return emit_reduction(o, clean_vertex(g, o.vertex), &a, &b, out);
}

QuasiDirection parse_direction(const std::string& s) {
  if (s == "i" || s == "delta'->delta") return QuasiDirection::DeltaPrimeToDelta;
  if (s == "ii" || s == "delta->delta'") return QuasiDirection::DeltaToDeltaPrime;
  throw UsageError("--direction must be i or ii");
}

int cmd_quasi(const Options& o, std::ostream& out, std::ostream&) {
  const auto g = load_graph(o.graph);
  if (o.couplings.empty()) {
    print_json(out, {{"quasigraph", quasigraph_json(quasi_remove_mixed_edge(
                                        g, o.edge, parse_direction(o.direction.empty() ? "i" : o.direction)))}});
    return 0;
  }
  if (o.couplings.size() != 2) throw UsageError("quasi-remove takes no coupling files or exactly two");
  const auto a = load_couplings(o.couplings[0], g);
  const auto b = load_couplings(o.couplings[1], g);
  std::optional<QuasiDirection> dir;
  if (!o.direction.empty()) dir = parse_direction(o.direction);
  const auto r = thm00_reduce(g, o.edge, a, b, dir);
  if (!o.graph_out.empty()) spill(o.graph_out, serialize_graph(r.reduction.graph));
  Json j = reduction_json(r.reduction);
  j["alpha"] = to_json(r.alpha);
  j["alpha2"] = to_json(r.alpha2);
  j["quasigraph"] = quasigraph_json(r.quasigraph);
  print_json(out, j);
  return 0;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream&) {
  print_json(out, report_json(uniqueness_report(load_graph(o.graph))));
  return 0;
}

int cmd_search(const Options& o, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(o.graph);
  warn_relations(g, err);
  SearchConfig cfg;
  cfg.starts = o.starts;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.max_denominator = o.max_denominator;
  print_json(out, search_json(find_isospectral_numeric(g, load_couplings(o.couplings.at(0), g), cfg)));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral computations and isospectrality tests for quantum graphs with delta and delta' vertices",
               "qgraph"};
  app.require_subcommand(1);
  Options o;
  int (*handler)(const Options&, std::ostream&, std::ostream&) = nullptr;

  auto threads = [&](CLI::App* s) {
    s->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto graph = [&](CLI::App* s) { s->add_option("graph", o.graph, "graph file")->required()->check(CLI::ExistingFile); };
  auto couplings = [&](CLI::App* s, int n, const char* what) {
    s->add_option("couplings", o.couplings, what)->required()->expected(n)->check(CLI::ExistingFile);
  };
  auto window = [&](CLI::App* s) {
    s->add_option_function<double>("--lmin", [&](double x) {
          o.lmin = x;
          o.lmin_set = true;
        }, "window start");
    s->add_option("--lmax", o.lmax, "window end");
  };

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues in a window (CSV lambda,multiplicity,flag)");
  graph(spectrum);
  couplings(spectrum, 1, "coupling file");
  window(spectrum);
  spectrum->add_option("--method", o.method, "secular or edge-basis")
      ->check(CLI::IsMember({"secular", "edge-basis"}))
      ->default_str("secular");
  spectrum->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  spectrum->add_option("--mu-step", o.mu_step, "scan step in sqrt(lambda); 0 picks one from the total length")
      ->check(CLI::NonNegativeNumber);
  spectrum->add_option("--rel-tol", o.rel_tol, "relative bisection tolerance")->check(CLI::PositiveNumber);
  threads(spectrum);
  spectrum->callback([&] { handler = cmd_spectrum; });

  auto* secular = app.add_subcommand("secular", "secular function on a uniform grid (CSV lambda,value)");
  graph(secular);
  couplings(secular, 1, "coupling file");
  window(secular);
  secular->add_option("--points", o.points, "grid size")->check(CLI::PositiveNumber);
  secular->callback([&] { handler = cmd_secular; });

  auto* expand = app.add_subcommand("expand", "class table of det(M - B) as JSON");
  graph(expand);
  expand->add_option("--method", o.method, "subgraphs or permutation")
      ->check(CLI::IsMember({"subgraphs", "permutation"}));
  expand->callback([&] { handler = cmd_expand; });

  auto* check = app.add_subcommand("check-iso", "exact isospectrality test (exit 0/1/2)");
  graph(check);
  couplings(check, 2, "two coupling files");
  check->add_flag("--relaxed", o.relaxed, "compare classes without their alpha-free parts");
  check->callback([&] { handler = cmd_check; });

  auto* sigma = app.add_subcommand("sigma", "sigma sets of two coupling vectors");
  graph(sigma);
  couplings(sigma, 2, "two coupling files");
  sigma->callback([&] { handler = cmd_sigma; });

  auto* balance = app.add_subcommand("balance", "balancing condition at one vertex or at every vertex");
  graph(balance);
  couplings(balance, 2, "two coupling files");
  balance->add_option("--vertex", o.vertex, "vertex id");
  balance->callback([&] { handler = cmd_balance; });

  auto* trim = app.add_subcommand("trim", "admissible trimming of a same-type edge or a loop vertex");
  graph(trim);
  trim->add_option("couplings", o.couplings, "optional coupling files to carry over")
      ->expected(0, 2)
      ->check(CLI::ExistingFile);
  trim->add_option("--edge", o.edge, "same-type edge to contract");
  trim->add_option("--vertex", o.vertex, "loop vertex to remove");
  trim->add_option("--graph-out", o.graph_out, "write the reduced graph file here");
  trim->callback([&] { handler = cmd_trim; });

  auto* clean = app.add_subcommand("clean", "remove a valence-2 vertex with zero coupling in both vectors");
  graph(clean);
  couplings(clean, 2, "two coupling files");
  clean->add_option("--vertex", o.vertex, "vertex id")->required();
  clean->add_option("--graph-out", o.graph_out, "write the reduced graph file here");
  clean->callback([&] { handler = cmd_clean; });

  auto* quasi = app.add_subcommand("quasi-remove",
                                   "remove a mixed edge; with two coupling files, regularize a doubly-zero endpoint");
  graph(quasi);
  quasi->add_option("couplings", o.couplings, "zero or two coupling files")->expected(0, 2)->check(CLI::ExistingFile);
  quasi->add_option("--edge", o.edge, "mixed edge")->required();
  quasi->add_option("--direction", o.direction, "i (delta' into delta) or ii (delta into delta')");
  quasi->add_option("--graph-out", o.graph_out, "write the regularized graph file here");
  quasi->callback([&] { handler = cmd_quasi; });

  auto* report = app.add_subcommand("report", "uniqueness results that apply to the graph shape");
  graph(report);
  report->callback([&] { handler = cmd_report; });

  auto* search = app.add_subcommand("search-iso", "numeric search for other couplings with the same spectrum");
  graph(search);
  couplings(search, 1, "coupling file");
  search->add_option("--starts", o.starts, "multistarts per zero pattern")->check(CLI::PositiveNumber);
  search->add_option("--seed", o.seed, "random seed");
  search->add_option("--max-denominator", o.max_denominator, "rationalization cap")->check(CLI::PositiveNumber);
  threads(search);
  search->callback([&] { handler = cmd_search; });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    return handler(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    print_json(out, error_json(e));
    return kExitDomain;
  }
}

}  // namespace qgraph::cli
