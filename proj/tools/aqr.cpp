// aqr: compute (A,q)-numerical radii and Crawford numbers, run the law suite,
// write figure data and convergence traces as CSV.
//
// Exit codes: 0 success, 1 law or envelope failure, 2 usage or domain error,
// 3 operator not A-bounded.

#include "aqrange/aqrange.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace aqr;

struct UsageError : Error {
  using Error::Error;
};

Complex parse_complex(const std::string& text) {
  std::stringstream ss(text);
  std::string re, im;
  std::getline(ss, re, ',');
  std::getline(ss, im, ',');
  try {
    std::size_t used = 0;
    double r = std::stod(re, &used);
    if (used != re.size()) throw UsageError("bad number '" + re + "'");
    double i = 0.0;
    if (!im.empty()) {
      i = std::stod(im, &used);
      if (used != im.size()) throw UsageError("bad number '" + im + "'");
    }
    std::string rest;
    if (std::getline(ss, rest, ',')) throw UsageError("expected RE[,IM], got '" + text + "'");
    return {r, i};
  } catch (const std::logic_error&) {
    throw UsageError("expected RE[,IM], got '" + text + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Budget make_budget(int restarts, int iterations) {
  Budget b;
  if (restarts > 0) {
    b.restarts = restarts;
    b.samples = 4 * restarts;
  }
  if (iterations > 0) b.iterations = iterations;
  return b;
}

/// Opens `path` for writing, or returns stdout for "" or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw UsageError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

// ---------------------------------------------------------------------------
// compute

struct ComputeArgs {
  std::string matrix, weight, q;
  int budget = 0, iterations = 0;
  std::uint64_t seed = 0;
  bool exact = false;
};

int run_compute(const ComputeArgs& a) {
  const Json mj = read_json_file(a.matrix);
  const CMatrix t = matrix_from_json(mj);
  if (matrix_from_json(matrix_to_json(t)) != t) throw ParseError("matrix JSON does not round-trip");
  const Weight w = a.weight.empty() ? Weight::identity(t.rows()) : weight_from_json(read_json_file(a.weight));
  require_dim(w, t, "compute");
  const QParam q(parse_complex(a.q));
  const Budget budget = make_budget(a.budget, a.iterations);

  const double norm = a_opnorm(w, t);  // throws NotABounded first
  const Estimate om = aq_radius(w, t, q, budget, a.seed);
  const Estimate cr = aq_crawford(w, t, q, budget, a.seed);
  const Estimate oa = a_radius(w, t);
  const Estimate ca = a_crawford(w, t);

  Json out;
  out["omega_aq"] = om.value;
  out["c_aq"] = cr.value;
  out["omega_a"] = oa.value;
  out["c_a"] = ca.value;
  out["opnorm"] = norm;
  out["gap_omega"] = norm - om.value;
  out["gap_c"] = norm - cr.value;
  out["witnesses"] = {{"omega_aq", estimate_to_json(om)}, {"c_aq", estimate_to_json(cr)}};
  out["budget"] = budget_to_json(budget);
  out["q"] = {q.value().real(), q.value().imag()};

  if (a.exact) {
    const CMatrix b = reduce_compact(w, t);
    if (b.rows() != 2) throw UsageError("--exact needs a 2x2 operator after reduction, got rank " + std::to_string(b.rows()));
    const double qr = detail::real_q(q.value());
    const double exact_om = q_radius_2x2(b, qr);
    const double exact_cr = q_crawford_2x2(b, qr);
    out["exact"] = {{"omega_aq", exact_om}, {"c_aq", exact_cr}};
    out["omega_aq"] = exact_om;
    out["c_aq"] = exact_cr;
    out["gap_omega"] = norm - exact_om;
    out["gap_c"] = norm - exact_cr;
    out["estimated"] = {{"omega_aq", om.value}, {"c_aq", cr.value}};
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// figure

std::vector<double> linspace(double lo, double hi, int k) {
  std::vector<double> v;
  for (int i = 0; i < k; ++i) v.push_back(k == 1 ? hi : lo + (hi - lo) * i / (k - 1));
  return v;
}

CMatrix nilpotent2(double corner) {
  CMatrix t = CMatrix::Zero(2, 2);
  t(0, 1) = corner;
  return t;
}

int run_figure(int example, const std::string& out_path, int grid) {
  if (grid < 2) throw UsageError("--grid must be at least 2");
  std::ostringstream csv;
  auto row = [&](std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
      csv << (first ? "" : ",") << fmt(v);
      first = false;
    }
    csv << '\n';
  };

  switch (example) {
    case 1: {
      // T = [[0, 1/70], [0, 0]]: omega = 1/140, ||T|| = 1/70.
      const CMatrix t = nilpotent2(1.0 / 70.0);
      const CanonicalForm2x2 form = canonical_2x2(t);
      const double omega = a_radius(Weight::identity(2), t).value, norm = largest_singular_value(t);
      csv << "q,two_q_omega,two_omega_q,upper_paper_sqrt1mq,upper_paper_sqrt1mq2\n";
      for (double q : linspace(0.0, 1.0, grid))
        row({q, 2.0 * q * omega, 2.0 * q_radius_2x2(form, q),
             2.0 * omega + 2.0 * std::sqrt(2.0) * std::sqrt(1.0 - q) * norm,
             norm * (1.0 + 2.0 * std::sqrt(2.0) * std::sqrt(1.0 - q * q))});
      std::cerr << "note: upper_paper_sqrt1mq is the bound 2 omega + 2 sqrt(2) sqrt(1-q) ||T||; "
                   "upper_paper_sqrt1mq2 is the printed expression (1/70)(1 + 2 sqrt(2) sqrt(1-q^2)).\n";
      break;
    }
    case 2:
    case 3: {
      const CMatrix t = example == 2 ? nilpotent2(1.0 / 24.0) : CMatrix(CMatrix::Identity(2, 2) / 20.0);
      const CanonicalForm2x2 form = canonical_2x2(t);
      const double omega = q_radius_2x2(form, 1.0), norm = largest_singular_value(t);
      csv << "q,abs_diff,upper_bound\n";
      for (double q : linspace(0.0, 1.0, grid))
        row({q, std::abs(q_radius_2x2(form, q) - omega), std::sqrt(2.0 * (1.0 - q)) * norm});
      if (example == 3)
        std::cerr << "note: abs_diff is |omega_q - omega| = (1-q)/20; the printed (q-1)/20 has the opposite sign.\n";
      break;
    }
    case 4: {
      const double omega = 1.0 / std::sqrt(2.0), norm = 1.0;
      csv << "q,omega_q,abs_diff,upper_bound\n";
      for (double q : linspace(0.5, 1.0, grid)) {
        const double wq = jordan3_q_radius(q);
        row({q, wq, std::abs(wq - omega), std::sqrt(2.0 * (1.0 - q)) * norm});
      }
      break;
    }
    default:
      throw UsageError("unknown example " + std::to_string(example) + " (expected 1-4)");
  }
  Output out(out_path);
  out.stream() << csv.str();
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  int instances = 200;
  std::string dims = "2,3,4";
  std::uint64_t seed = 0;
  int budget = 0, iterations = 0;
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  if (a.instances < 0) throw UsageError("--instances must be nonnegative");
  SuiteConfig cfg;
  cfg.n_instances = a.instances;
  cfg.seed = a.seed;
  cfg.budget = make_budget(a.budget, a.iterations);
  cfg.dims.clear();
  std::stringstream ss(a.dims);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      int d = std::stoi(item);
      if (d < 2) throw UsageError("--dims entries must be at least 2");
      cfg.dims.push_back(d);
    } catch (const std::logic_error&) {
      throw UsageError("bad --dims entry '" + item + "'");
    }
  }
  const auto reports = run_suite(cfg);
  const auto summary = summarize(reports);
  const int failures = count_failures(reports);
  if (!a.out.empty()) {
    Output csv(a.out);
    write_summary_csv(csv.stream(), summary);
    Output jsonl(a.out + ".jsonl");
    write_jsonl(jsonl.stream(), reports);
  }
  write_summary_csv(std::cout, summary);
  std::cout << "instances " << a.instances << ", reports " << reports.size() << ", failures " << failures
            << '\n';
  for (const auto& r : reports)
    if (!r.pass && !r.skipped)
      std::cerr << "FAIL " << r.law_id << ' ' << r.instance_digest << " lhs " << fmt(r.lhs) << " rhs "
                << fmt(r.rhs) << '\n';
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// converge

struct ConvergeArgs {
  std::string rule = "perturb";
  std::string quantity;
  std::string q = "0.5";
  std::string matrix, weight, direction;
  int grid = 64;
  int budget = 0, iterations = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_converge(const ConvergeArgs& a) {
  const Budget budget = make_budget(a.budget, a.iterations);
  std::string quantity = a.quantity;
  if (quantity.empty()) quantity = a.rule == "multiplication" ? "gap_omega" : "radius";
  if (quantity != "radius" && quantity != "crawford" && quantity != "gap_omega" && quantity != "gap_c")
    throw UsageError("--quantity must be radius, crawford, gap_omega or gap_c");

  auto load_matrix = [&](const std::string& path, const CMatrix& fallback) {
    return path.empty() ? fallback : matrix_from_json(read_json_file(path));
  };

  ConvergenceTrace trace;
  if (a.rule == "qseq") {
    if (quantity.rfind("gap", 0) == 0) throw UsageError("qseq traces radius or crawford");
    const CMatrix t = load_matrix(a.matrix, nilpotent2(1.0 / 24.0));
    const Weight w = a.weight.empty() ? Weight::identity(t.rows()) : weight_from_json(read_json_file(a.weight));
    std::vector<QParam> qs;
    for (int n = 2; n <= 256; n *= 2) qs.emplace_back(1.0 - 1.0 / (static_cast<double>(n) * n));
    trace = trace_q(w, t, qs, budget, a.seed, quantity == "radius" ? Quantity::Radius : Quantity::Crawford);
    for (std::size_t k = 0; k < trace.indices.size(); ++k) trace.indices[k] = 2 << k;
  } else {
    const QParam q(parse_complex(a.q));
    std::optional<OperatorSequence> seq;
    if (a.rule == "multiplication") {
      if (a.grid < 2) throw UsageError("--grid must be at least 2");
      seq = OperatorSequence::multiplication_default(a.grid);
    } else if (a.rule == "perturb" || a.rule == "constant") {
      const CMatrix t = load_matrix(a.matrix, nilpotent2(1.0 / 70.0));
      const Weight w =
          a.weight.empty() ? Weight::identity(t.rows()) : weight_from_json(read_json_file(a.weight));
      CMatrix e = a.rule == "constant" ? CMatrix(CMatrix::Zero(t.rows(), t.cols())) : load_matrix(a.direction, t);
      seq = OperatorSequence::perturbation(w, t, e);
    } else {
      throw UsageError("--rule must be perturb, constant, multiplication or qseq");
    }
    const auto idx = seq->default_indices();
    if (quantity == "radius") trace = trace_radius(*seq, q, idx, budget, a.seed);
    else if (quantity == "crawford") trace = trace_crawford(*seq, q, idx, budget, a.seed);
    else {
      auto [go, gc] = trace_gaps(*seq, q, idx, budget, a.seed);
      trace = quantity == "gap_omega" ? go : gc;
    }
  }
  Output out(a.out);
  write_csv(out.stream(), trace);
  if (!trace.within_envelope()) {
    std::cerr << "envelope violated\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"(A,q)-numerical radius and Crawford number toolkit"};
  app.require_subcommand(1);

  ComputeArgs ca;
  auto* compute = app.add_subcommand("compute", "Estimate all quantities for one operator");
  compute->add_option("--matrix", ca.matrix, "Matrix JSON file")->required();
  compute->add_option("--weight", ca.weight, "Weight JSON file (default identity)");
  compute->add_option("--q", ca.q, "q as RE[,IM]")->required();
  compute->add_option("--budget", ca.budget, "Restarts (samples are 4x)");
  compute->add_option("--iterations", ca.iterations, "Iterations per restart");
  compute->add_option("--seed", ca.seed, "Seed");
  compute->add_flag("--exact", ca.exact, "Use the 2x2 closed forms (real q)");

  int example = 0, grid = 101;
  std::string fig_out;
  auto* figure = app.add_subcommand("figure", "Write the curves of a worked example as CSV");
  figure->add_option("--example", example, "Example 1-4")->required();
  figure->add_option("--out", fig_out, "Output CSV (default stdout)");
  figure->add_option("--grid", grid, "Number of q points");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the randomized law suite");
  verify->add_option("--instances", va.instances, "Random instances");
  verify->add_option("--dims", va.dims, "Comma-separated dimensions");
  verify->add_option("--seed", va.seed, "Seed");
  verify->add_option("--budget", va.budget, "Restarts (samples are 4x)");
  verify->add_option("--iterations", va.iterations, "Iterations per restart");
  verify->add_option("--out", va.out, "Summary CSV; reports go to <out>.jsonl");

  ConvergeArgs ga;
  auto* converge = app.add_subcommand("converge", "Trace convergence along a sequence");
  converge->add_option("--rule", ga.rule, "perturb, constant, multiplication or qseq");
  converge->add_option("--quantity", ga.quantity, "radius, crawford, gap_omega or gap_c");
  converge->add_option("--q", ga.q, "q as RE[,IM]");
  converge->add_option("--matrix", ga.matrix, "Limit matrix JSON");
  converge->add_option("--weight", ga.weight, "Weight JSON");
  converge->add_option("--direction", ga.direction, "Perturbation direction JSON (default the matrix)");
  converge->add_option("--grid", ga.grid, "Grid points for the multiplication rule");
  converge->add_option("--budget", ga.budget, "Restarts (samples are 4x)");
  converge->add_option("--iterations", ga.iterations, "Iterations per restart");
  converge->add_option("--seed", ga.seed, "Seed");
  converge->add_option("--out", ga.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*compute) return run_compute(ca);
    if (*figure) return run_figure(example, fig_out, grid);
    if (*verify) return run_verify(va);
    if (*converge) return run_converge(ga);
  } catch (const NotABounded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
