// nnrank: ranks, nonnegative ranks and witnesses of nonnegative matrices, plus
// experiments on the kernel 1 + cos(s - t).
//
// Every invocation prints exactly one JSON object on stdout. Failures print
// {"error": {"code", "message"}} and exit with status 2.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nnrank/nnrank.hpp"

namespace {

using nnrank::json;

struct Options {
  std::string in;
  std::string out;
  std::string witness;
  std::string plot;
  std::string method = "auto";
  std::optional<std::size_t> k;
  std::size_t restarts = 64;
  std::uint64_t seed = 0;
  std::size_t iters = 2000;
  double tol = nnrank::default_verify_tol;
  double rank_tol = nnrank::default_rank_tol;
  double eps = 1e-12;
  double a = 0, b = 0, c = 0, r = 0.5;
  std::size_t n = 512;
  double offset = 0.0;
  std::vector<std::size_t> ns{4, 6, 8, 12};
};

nnrank::NmfOptions nmf_options(const Options& o) { return {o.restarts, o.seed, o.tol, o.iters}; }

nnrank::AnyMatrix load_input(const Options& o) {
  nnrank::require(!o.in.empty(), nnrank::ErrorCode::precondition, "--in FILE is required");
  return nnrank::load_matrix(o.in);
}

void write_witness(const Options& o, const json& witness) {
  if (!o.out.empty()) nnrank::write_text_file(o.out, witness.dump(2) + "\n");
}

json run_nnrank(const Options& o) {
  const nnrank::AnyMatrix m = load_input(o);
  const auto b = std::visit([](const auto& x) { return nnrank::bounds(x); }, m);
  std::string method = o.method;
  if (method == "auto") method = b.lower <= 2 ? "exact2" : (b.lower == 3 ? "exact3" : "nmf");

  json report;
  if (method == "bounds") {
    report = nnrank::bounds_report(m);
  } else if (method == "exact2") {
    nnrank::require(b.lower <= 2, nnrank::ErrorCode::precondition,
                    "rank " + std::to_string(b.lower) + " input: exact2 needs rank <= 2 (try --method exact3)");
    report = nnrank::exact2_report(m);
  } else if (method == "exact3") {
    nnrank::require(b.lower == 3, nnrank::ErrorCode::precondition,
                    "rank " + std::to_string(b.lower) + " input: exact3 needs rank 3 (try --method " +
                        (b.lower <= 2 ? "exact2" : "nmf") + ")");
    std::visit(
        [&](const auto& t) {
          const nnrank::Rank3Result r = nnrank::nnrank_rank3(t);
          report = nnrank::exact3_report(r, nnrank::verify_any(t, r.witness));
          if (!o.plot.empty()) {
            std::ostringstream csv;
            nnrank::write_polygon_plot_csv(csv, r);
            nnrank::write_text_file(o.plot, csv.str());
          }
        },
        m);
  } else if (method == "nmf") {
    const std::size_t lo = o.k ? *o.k : std::max<std::size_t>(b.lower, 1);
    const std::size_t hi = o.k ? *o.k : std::max(lo, b.upper);
    report = nnrank::nmf_report(m, lo, hi, nmf_options(o));
  } else {
    nnrank::fail(nnrank::ErrorCode::precondition, "unknown method '" + method + "'");
  }
  report["bounds"] = {{"lower", b.lower}, {"upper", b.upper}, {"reference_upper", b.reference_upper}};
  if (report.contains("witness")) write_witness(o, report["witness"]);
  return report;
}

json run_factor(const Options& o) {
  const nnrank::AnyMatrix m = load_input(o);
  const std::size_t rank = nnrank::matrix_rank(m, o.rank_tol);
  json report;
  if (rank <= 2) {
    report = nnrank::exact2_report(m);
  } else if (rank == 3) {
    report = nnrank::exact3_report(m);
  } else {
    nnrank::fail(nnrank::ErrorCode::precondition,
                 "rank " + std::to_string(rank) + " input: constructive factorization needs rank <= 3 (try nnrank --method nmf)");
  }
  write_witness(o, report["witness"]);
  return report;
}

json run_verify(const Options& o) {
  const nnrank::AnyMatrix m = load_input(o);
  nnrank::require(!o.witness.empty(), nnrank::ErrorCode::precondition, "--witness FILE is required");
  const std::string text = nnrank::read_text_file(o.witness);
  const json j = nnrank::parse_json_text(text, o.witness);
  const nnrank::AnyFactorization f = nnrank::factorization_from_json(j.contains("witness") ? j["witness"] : j, o.tol);
  return std::visit(
      [&](const auto& t) {
        const bool exact = std::holds_alternative<nnrank::ExactFactorization>(f) && nnrank::is_exact_v<
            typename std::decay_t<decltype(t)>::value_type>;
        return json{{"verified", nnrank::verify_any(t, f, o.tol)},
                    {"k", nnrank::witness_k(f)},
                    {"arithmetic", exact ? "exact" : "float"},
                    {"tol", o.tol},
                    {"residual", nnrank::report_residual(std::visit(
                                     [&](const auto& w) { return nnrank::residual(t, w); }, f))}};
      },
      m);
}

json run_preimage(const Options& o) {
  const nnrank::IceCreamPoint p{o.a, o.b, o.c};
  const nnrank::GridSpec grid(o.n);
  const nnrank::GridFunction f = nnrank::poisson_preimage(p, o.r, grid);
  if (!o.out.empty()) {
    std::ostringstream csv;
    nnrank::write_grid_function_csv(csv, f);
    nnrank::write_text_file(o.out, csv.str());
  }
  const nnrank::IceCreamPoint q = nnrank::moments(f);
  double min_value = f.values().empty() ? 0.0 : f.values().front();
  for (double v : f.values()) min_value = std::min(min_value, v);
  json report{{"target", {p.a, p.b, p.c}}, {"r", o.r}, {"n", o.n}, {"moments", {q.a, q.b, q.c}},
              {"min_value", min_value}};
  if (p.a != 0.0 || p.b != 0.0 || p.c != 0.0) {
    const auto params = nnrank::poisson_params(p, o.r);
    report["theta"] = params.theta;
    report["alpha"] = params.alpha;
  }
  return report;
}

json run_growth(const Options& o) {
  nnrank::GrowthOptions opt;
  opt.nmf_options = nmf_options(o);
  const auto rows = nnrank::growth_experiment(o.ns, o.offset, opt);
  if (!o.out.empty()) {
    std::ostringstream csv;
    nnrank::write_growth_csv(csv, rows);
    nnrank::write_text_file(o.out, csv.str());
  }
  return nnrank::growth_json(rows, o.offset, opt);
}

json run_kernel(const Options& o) {
  const nnrank::FloatMatrix k = nnrank::kernel_matrix(o.n, o.offset);
  const json matrix = nnrank::to_json(k);
  if (!o.out.empty()) {
    if (o.out.size() >= 5 && o.out.substr(o.out.size() - 5) == ".json") {
      nnrank::write_text_file(o.out, matrix.dump() + "\n");
    } else {
      std::ostringstream csv;
      nnrank::write_matrix_csv(csv, k);
      nnrank::write_text_file(o.out, csv.str());
    }
  }
  return {{"n", o.n}, {"offset", o.offset}, {"matrix", matrix}};
}

void print_error(const std::string& code, const std::string& message) {
  std::cout << json{{"error", {{"code", code}, {"message", message}}}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ranks, nonnegative ranks and factorization witnesses of nonnegative matrices"};
  app.require_subcommand(1);
  Options o;
  std::function<json()> action;

  auto add_fit_flags = [&](CLI::App* sub) {
    sub->add_option("--k", o.k, "inner dimension for nmf (default: scan the bounds)");
    sub->add_option("--restarts", o.restarts, "NMF restarts")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "NMF seed");
    sub->add_option("--iters", o.iters, "NMF iterations per restart");
    sub->add_option("--tol", o.tol, "fit / verification tolerance")->check(CLI::PositiveNumber);
  };

  auto* rank = app.add_subcommand("rank", "rank of a matrix (exact for rational input)");
  rank->add_option("--in", o.in, "matrix file (.csv or .json)")->required();
  rank->add_option("--rank-tol", o.rank_tol, "relative singular value threshold for float input");
  rank->callback([&] { action = [&] { return nnrank::rank_report(load_input(o), o.rank_tol); }; });

  auto* nnr = app.add_subcommand("nnrank", "nonnegative rank: bounds, exact2, exact3 or nmf");
  nnr->add_option("--in", o.in, "matrix file")->required();
  nnr->add_option("--method", o.method, "auto|bounds|exact2|exact3|nmf")
      ->check(CLI::IsMember({"auto", "bounds", "exact2", "exact3", "nmf"}));
  nnr->add_option("--out", o.out, "write the witness JSON here");
  nnr->add_option("--plot", o.plot, "exact3: write inner/outer/witness polygon CSV here");
  add_fit_flags(nnr);
  nnr->callback([&] { action = [&] { return run_nnrank(o); }; });

  auto* factor = app.add_subcommand("factor", "constructive nonnegative factorization (rank <= 3)");
  factor->add_option("--in", o.in, "matrix file")->required();
  factor->add_option("--out", o.out, "write the witness JSON here");
  factor->callback([&] { action = [&] { return run_factor(o); }; });

  auto* ver = app.add_subcommand("verify", "check a witness against a matrix");
  ver->add_option("--in", o.in, "matrix file")->required();
  ver->add_option("--witness", o.witness, "factorization JSON (or a report containing 'witness')")->required();
  ver->add_option("--tol", o.tol, "float tolerance")->check(CLI::PositiveNumber);
  ver->callback([&] { action = [&] { return run_verify(o); }; });

  auto* scone = app.add_subcommand("scone", "experiments on the kernel 1 + cos(s - t)");
  scone->require_subcommand(1);
  auto* mem = scone->add_subcommand("membership", "classify (a, b, c) against c >= sqrt(a^2 + b^2)");
  mem->add_option("--a", o.a)->required();
  mem->add_option("--b", o.b)->required();
  mem->add_option("--c", o.c)->required();
  mem->add_option("--eps", o.eps, "boundary band half-width");
  mem->callback([&] { action = [&] { return nnrank::membership_report({o.a, o.b, o.c}, o.eps); }; });

  auto* pre = scone->add_subcommand("preimage", "nonnegative Poisson preimage of an interior point");
  pre->add_option("--a", o.a)->required();
  pre->add_option("--b", o.b)->required();
  pre->add_option("--c", o.c)->required();
  pre->add_option("--r", o.r, "Poisson radius in (R/c, 1)");
  pre->add_option("--n", o.n, "grid size")->check(CLI::Range(3, 1 << 24));
  pre->add_option("--out", o.out, "write t,value CSV here");
  pre->callback([&] { action = [&] { return run_preimage(o); }; });

  auto* growth = scone->add_subcommand("growth", "nonnegative ranks of discretized kernel matrices");
  growth->add_option("--ns", o.ns, "grid sizes")->delimiter(',');
  growth->add_option("--offset", o.offset, "grid offset");
  growth->add_option("--out", o.out, "write CSV here");
  add_fit_flags(growth);
  growth->callback([&] { action = [&] { return run_growth(o); }; });

  auto* kernel = scone->add_subcommand("kernel", "write the sampled kernel matrix");
  kernel->add_option("--n", o.n, "grid size")->check(CLI::Range(1, 4096));
  kernel->add_option("--offset", o.offset, "grid offset");
  kernel->add_option("--out", o.out, "write .csv or .json here");
  kernel->callback([&] { action = [&] { return run_kernel(o); }; });

  auto* demo = app.add_subcommand("demo-robbins", "rank and nonnegative rank of the Robbins matrix");
  demo->callback([&] { action = [] { return nnrank::demo_robbins_report(); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    json report = action();
    report["seed"] = o.seed;
    std::cout << report.dump() << std::endl;
    return 0;
  } catch (const nnrank::Error& e) {
    print_error(std::string(nnrank::to_string(e.code())), e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
}
