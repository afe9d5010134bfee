// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exgrad/harness/check.hpp"
#include "exgrad/harness/experiment.hpp"
#include "exgrad/harness/presets.hpp"
#include "exgrad/harness/rate.hpp"

namespace {

using namespace exgrad;
using namespace exgrad::harness;
using json = nlohmann::json;

using Sp = Space<double>;
using Set = FeasibleSet<double>;
using Op = MonotoneOperator<double>;
using Map = FixedPointMap<double>;
using F = Bifunction<double>;
using P = Point<double>;
using D = DualPoint<double>;
using Seq = Sequence<double>;
using Query = ResolventQuery<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Collects the first few failures of one criterion.
class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    if (failures_.size() < 3) failures_.push_back(what);
    ++failed_;
  }
  void expect_le(double value, double bound, const std::string& what) {
    std::ostringstream s;
    s << what << ": " << value << " > " << bound;
    expect(value <= bound, s.str());
  }
  bool passed() const { return failed_ == 0 && checks_ > 0; }
  std::string summary() const {
    std::ostringstream s;
    s << checks_ << " checks";
    if (failed_ > 0) {
      s << ", " << failed_ << " failed";
      for (const auto& f : failures_) s << "; " << f;
    }
    return s.str();
  }

 private:
  int checks_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
};

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<TraceRow> rows_of(const SolveResult<double>& res) {
  std::vector<TraceRow> rows;
  for (const auto& r : res.trace)
    rows.push_back({r.k, r.x.coords(), r.u.coords(), r.y.coords(), r.z.coords(), r.step_norm, r.phi_gap,
                    r.resolvent_violation});
  return rows;
}

// x_{k+1} / x_k obtained by substituting u = x/2, y = 3x/4, z = 3x/8,
// Tz = z and Sy = x/6 into the combination step.
double hand_factor(int k) {
  const double a = 1.0 / 3 + 1.0 / (4.0 * k), b = 1.0 / 2 - 1.0 / (6.0 * k), g = 1.0 / 6 - 1.0 / (12.0 * k);
  return a + b * 3.0 / 8 + g / 6;
}

P random_point(UniformSampler<double>& rng, Index dim) {
  return P(rng.unit_cube(dim).array() * 6 - 3);
}

// 1. First iteration of both presets.
void first_step(Criterion& c) {
  const auto pos = execute(preset_experiment("paper-35"));
  c.expect(!pos.trace.empty(), "paper-35 produced no iterations");
  if (!pos.trace.empty()) {
    const auto& r = pos.trace[0];
    c.expect_le(std::abs(r.u[0] - 1.75), 1e-12, "paper-35 u1");
    c.expect_le(std::abs(r.y[0] - 2.625), 1e-12, "paper-35 y1");
    c.expect_le(std::abs(r.z[0] - 1.3125), 1e-12, "paper-35 z1");
  }
  const auto neg = execute(preset_experiment("paper-neg4"));
  c.expect(!neg.trace.empty(), "paper-neg4 produced no iterations");
  if (!neg.trace.empty()) {
    c.expect_le(std::abs(neg.trace[0].y[0] + 3.0), 1e-12, "paper-neg4 y1");
    c.expect_le(std::abs(neg.trace[0].z[0] + 1.5), 1e-12, "paper-neg4 z1");
  }
}

// 2. Every step follows the hand-derived factor; the 79/144 - 16/(304k) closed form does not.
void recurrence(Criterion& c) {
  const auto res = execute(preset_experiment("paper-35"));
  c.expect(res.trace.size() == 100, "expected 100 iterations, got " + std::to_string(res.trace.size()));
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    const auto& rec = res.trace[i];
    const double next = i + 1 < res.trace.size() ? res.trace[i + 1].x[0] : res.final_point[0];
    c.expect_le(rel_err(next, hand_factor(rec.k) * rec.x[0]), 1e-12, "x_" + std::to_string(rec.k + 1));
  }
  if (res.trace.size() >= 2) {
    const double x2 = res.trace[1].x[0];
    c.expect_le(std::abs(x2 - 2.5277777777777777), 1e-12, "x_2 against 104/144 * 3.5");
    // The closed form 79/144 - 16/(304k) would give 1.7359 at k = 2.
    c.expect(std::abs(x2 - 1.7359) > 0.5, "x_2 matches 79/144 - 16/(304k)");
  }
}

// 3. Final magnitude and tail rate on both presets.
void strong_convergence(Criterion& c) {
  for (const char* name : {"paper-35", "paper-neg4"}) {
    const auto res = execute(preset_experiment(name));
    c.expect(res.trace.size() == 100, std::string(name) + ": expected 100 iterations");
    if (res.trace.size() < 100) continue;
    c.expect_le(std::abs(res.trace[99].x[0]), 1e-24, std::string(name) + " |x_100|");
    try {
      const auto rate = estimate_rate(rows_of(res));
      c.expect(rate.geometric_ratio >= 0.52 && rate.geometric_ratio <= 0.58,
               std::string(name) + " ratio " + std::to_string(rate.geometric_ratio) + " outside [0.52, 0.58]");
    } catch (const RateError& e) {
      c.expect(false, std::string(name) + ": " + e.what());
    }
  }
}

// 4. phi(0, x_k) never increases.
void phi_monotone(Criterion& c) {
  for (const char* name : {"paper-35", "paper-neg4"}) {
    const auto res = execute(preset_experiment(name));
    double prev = kInf;
    for (const auto& rec : res.trace) {
      // Recomputed from the definition for the euclidean line: phi(0, x) = x^2.
      const double phi = rec.x[0] * rec.x[0];
      c.expect(rec.phi_gap.has_value(), std::string(name) + ": phi gap missing");
      if (rec.phi_gap) c.expect_le(std::abs(*rec.phi_gap - phi), 1e-12 * (1 + phi), std::string(name) + " phi_gap");
      c.expect_le(phi, prev + 1e-10, std::string(name) + " phi at k = " + std::to_string(rec.k));
      prev = phi;
    }
  }
}

// 5. Geometry identities and inequalities on four spaces.
void geometry(Criterion& c) {
  const Sp spaces[] = {Sp::euclidean(1), Sp::euclidean(2), Sp::euclidean(4), Sp::lp(4, 1.5, std::sqrt(0.5))};
  constexpr double tol = 1e-8;
  for (const auto& sp : spaces) {
    const std::string tag = sp.is_euclidean() ? "euclidean/" + std::to_string(sp.dim()) : "lp1.5/4";
    UniformSampler<double> rng(42);
    const double lip = 2 / (sp.c() * sp.c());
    for (int s = 0; s < 200; ++s) {
      const P x = random_point(rng, sp.dim()), y = random_point(rng, sp.dim()), z = random_point(rng, sp.dim());
      const D jx = duality_map(sp, x), jy = duality_map(sp, y), jz = duality_map(sp, z);
      const double nx = norm(sp, x), ny = norm(sp, y);
      const double scale = 1 + (nx + ny) * (nx + ny);

      c.expect_le(std::abs(pairing(sp, jx, x) - nx * nx), tol * scale, tag + " <x,Jx> = |x|^2");
      c.expect_le(std::abs(dual_norm(sp, jx) - nx), tol * scale, tag + " |Jx|_* = |x|");
      c.expect_le(norm(sp, duality_map_inverse(sp, jx) - x), tol * scale, tag + " J^-1 J x = x");

      const double phi = lyapunov(sp, x, y);
      c.expect(phi >= (nx - ny) * (nx - ny) - tol * scale && phi <= (nx + ny) * (nx + ny) + tol * scale,
               tag + " phi sandwich");
      const double three = lyapunov(sp, x, z) + lyapunov(sp, z, y) + 2 * pairing(sp, jz - jy, x - z);
      c.expect_le(std::abs(phi - three), tol * scale, tag + " three-point identity");

      // V(x, x*) + 2 <J^-1 x* - x, y*> <= V(x, x* + y*), with x* = Jy, y* = Jz.
      const double lhs = v_functional(sp, x, jy) + 2 * pairing(sp, jz, duality_map_inverse(sp, jy) - x);
      c.expect_le(lhs, v_functional(sp, x, jy + jz) + tol * (1 + std::abs(lhs)), tag + " V inequality");

      c.expect_le(norm(sp, x - y), lip * dual_norm(sp, jx - jy) + tol, tag + " inverse duality Lipschitz");
    }
  }
}

// phi(y, x) in l_p, evaluated from the definition for the grid oracle.
double phi_lp(double p, const Vector<double>& y, const Vector<double>& x) {
  auto pnorm = [p](const Vector<double>& v) { return std::pow(v.array().abs().pow(p).sum(), 1 / p); };
  const double nx = pnorm(x), ny = pnorm(y);
  double pair = 0;
  for (Index i = 0; i < x.size(); ++i)
    pair += std::pow(nx, 2 - p) * std::copysign(std::pow(std::abs(x[i]), p - 1), x[i]) * y[i];
  return ny * ny - 2 * pair + nx * nx;
}

// Minimizer of phi(., x) over a 2-D box: a 1e-2 sweep, then a 1e-4 sweep in a
// window around the coarse minimizer (phi(., x) is strictly convex).
Vector<double> grid_projection(double p, const Box<double>& box, const Vector<double>& x) {
  auto sweep = [&](double lo0, double hi0, double lo1, double hi1, double h) {
    Vector<double> best(2), y(2);
    double best_val = kInf;
    const long n0 = std::lround((hi0 - lo0) / h), n1 = std::lround((hi1 - lo1) / h);
    for (long i = 0; i <= n0; ++i)
      for (long j = 0; j <= n1; ++j) {
        y << lo0 + static_cast<double>(i) * h, lo1 + static_cast<double>(j) * h;
        const double v = phi_lp(p, y, x);
        if (v < best_val) {
          best_val = v;
          best = y;
        }
      }
    return best;
  };
  const Vector<double> coarse = sweep(box.lower[0], box.upper[0], box.lower[1], box.upper[1], 1e-2);
  auto lo = [&](int i) { return std::max(box.lower[i], coarse[i] - 2e-2); };
  auto hi = [&](int i) { return std::min(box.upper[i], coarse[i] + 2e-2); };
  return sweep(lo(0), hi(0), lo(1), hi(1), 1e-4);
}

// 6. Projection suite.
void projection(Criterion& c) {
  UniformSampler<double> rng(7);
  const auto e3 = Sp::euclidean(3);
  for (int s = 0; s < 100; ++s) {
    const Vector<double> lo = rng.unit_cube(3).array() * 2 - 2, hi = lo.array() + rng.unit_cube(3).array() * 3;
    const auto box = Set::box(lo, hi);
    const auto half = Set::halfspace(D(rng.unit_cube(3).array() - 0.5), rng.uniform(-1, 1));
    const P x(rng.unit_cube(3).array() * 10 - 5);
    c.expect(generalized_projection(e3, box, x) == metric_projection(e3, box, x), "euclidean box projection");
    c.expect(generalized_projection(e3, half, x) == metric_projection(e3, half, x), "euclidean halfspace projection");
  }

  const auto l = Sp::lp(4, 1.5, std::sqrt(0.5));
  for (int s = 0; s < 40; ++s) {
    const Vector<double> lo = rng.unit_cube(4).array() * 2 - 2, hi = lo.array() + rng.unit_cube(4).array() * 2 + 0.1;
    for (const auto& set : {Set::box(lo, hi), Set::halfspace(D(rng.unit_cube(4).array() - 0.5), rng.uniform(-1, 1))}) {
      const P x(rng.unit_cube(4).array() * 8 - 4);
      const P z = generalized_projection(l, set, x);
      c.expect(contains(set, z, 1e-12), "lp projection leaves the set");
      c.expect_le(projection_residual(l, set, x, z, 500), 1e-6, "lp variational residual");
      for (int t = 0; t < 5; ++t) {
        const P y = random_point_in(set, rng);
        c.expect_le(lyapunov(l, y, z) + lyapunov(l, z, x), lyapunov(l, y, x) + 1e-6, "lp projection three-point");
      }
    }
  }

  const auto l2 = Sp::lp(2, 1.5, std::sqrt(0.5));
  const double cases[][6] = {{0, 0, 1, 1, 2, 2},        {0, 0, 1, 1, 2, -0.5},        {-1, 0, 1, 2, 0.3, 3.5},
                             {-1, -1, 0.5, 0.25, 3, 0.1}, {0.2, -2, 1.5, -0.5, -1, 1}};
  for (const auto& k : cases) {
    Vector<double> lo(2), hi(2), x(2);
    lo << k[0], k[1];
    hi << k[2], k[3];
    x << k[4], k[5];
    const auto set = Set::box(lo, hi);
    const Vector<double> z = generalized_projection(l2, set, P(x)).coords();
    c.expect_le((z - grid_projection(1.5, *set.as_box(), x)).cwiseAbs().maxCoeff(), 1e-3, "lp grid oracle");
  }
}

// 7. Resolvent suite on f(u,y) = 9y^2 + 3uy - 12u^2, A = I, C = [-4, 4].
void resolvent(Criterion& c) {
  const auto e1 = Sp::euclidean(1);
  const auto set = Set::interval(-4, 4);
  const F f = F::quadratic_1d(9, 3);
  const Op a = Op::identity(e1);
  auto query = [&](double r, double x) { return Query{e1, f, a, set, r, P{x}}; };

  for (double x : {3.5, -4.0, 1.0, -0.25})
    c.expect(resolve(query(1.0 / 22, x)).u[0] == x / 2, "closed form u = x/2 at x = " + std::to_string(x));

  UniformSampler<double> rng(8);
  for (int s = 0; s < 100; ++s) {
    const double r = rng.uniform(0.01, 2), x = rng.uniform(-10, 10);
    const auto q = query(r, x);
    const auto out = resolve(q);
    c.expect_le(verify_resolvent(out.u, q, 64).max_violation, 1e-10, "resolvent violation");
    c.expect_le(std::abs(resolvent_solve(q)[0] - out.u[0]), 1e-8, "numerical vs closed form");
  }

  const double r = 1.0 / 22;
  for (int s = 0; s < 100; ++s) {
    const double x = rng.uniform(-4, 4), y = rng.uniform(-4, 4);
    const double kx = resolve(query(r, x)).u[0], ky = resolve(query(r, y)).u[0];
    c.expect_le((kx - ky) * (kx - ky), (kx - ky) * (x - y) + 1e-9, "firm nonexpansiveness");
    c.expect_le(kx * kx + (kx - x) * (kx - x), x * x + 1e-9, "phi(0, Kx) + phi(Kx, x) <= phi(0, x)");
  }
}

std::string with_edit(const std::function<void(json&)>& edit) {
  json j = json::parse(preset_source("paper-35"));
  edit(j);
  return j.dump();
}

HypothesisReport check_text(const std::string& text) {
  return check_hypotheses(parse_experiment(text, "<mutated>", Validation::structural_only), 200, 42);
}

// 8. Hypothesis checker on the preset and three mutations.
void checker(Criterion& c) {
  const auto spec = preset_experiment("paper-35");
  const auto ok = check_hypotheses(spec, 200, 42);
  for (const auto& item : ok.items) c.expect(item.status == CheckStatus::pass, "preset: " + item.name);
  for (const char* name : {"(A1)", "(A2)", "(A3)", "(A4)", "(i)", "(ii)", "(iii)", "(iv)", "T:", "S:", "alpha:",
                           "norm domination"})
    c.expect(ok.find(name) != nullptr, std::string("missing item ") + name);
  const auto alpha = estimate_alpha(spec.problem.space, spec.problem.op, spec.problem.set, 200);
  c.expect_le(std::abs(alpha.value - 1), 1e-12, "alpha estimate for the identity");

  const auto b = check_text(with_edit([](json& j) { j["bifunction"]["b"] = -1; }));
  c.expect(!b.ok() && b.find("(A2)") && b.find("(A2)")->status == CheckStatus::fail, "b = -1 does not fail (A2)");

  const auto tau = check_text(with_edit([](json& j) { j["schedule"]["tau"] = 0.6; }));
  c.expect(!tau.ok() && tau.find("(iv)") && tau.find("(iv)")->status == CheckStatus::fail, "tau = 0.6 does not fail (iv)");
  try {
    parse_experiment(with_edit([](json& j) { j["schedule"]["tau"] = 0.6; }));
    c.expect(false, "tau = 0.6 accepted by full validation");
  } catch (const ValidationError& e) {
    c.expect(std::string(e.what()).find("(iv)") != std::string::npos, std::string("wrong rejection: ") + e.what());
  }

  // Keep (i) intact: beta absorbs the mass gamma gave up.
  const auto gamma = check_text(with_edit([](json& j) {
    j["schedule"]["gamma"] = {{"type", "constant"}, {"value", 0}};
    j["schedule"]["beta"] = {{"type", "affine_reciprocal"}, {"base", "2/3"}, {"slope", "-1/4"}};
  }));
  c.expect(gamma.find("(i)") && gamma.find("(i)")->status == CheckStatus::pass, "gamma = 0 mutation broke (i)");
  c.expect(gamma.find("(ii)") && gamma.find("(ii)")->status == CheckStatus::warn, "gamma = 0 does not flag (ii)");
}

// 9. Korpelevich baseline and the corollary solver on the same VI.
void baseline(Criterion& c) {
  const auto e2 = Sp::euclidean(2);
  const Eigen::MatrixXd m = Eigen::Vector2d(1, 2).asDiagonal();
  const auto box = Set::box(Vector<double>::Constant(2, -1), Vector<double>::Constant(2, 1));
  const Op a = Op::linear(e2, m);
  const P x1{1.0, -1.0};

  const auto k = solve_korpelevich(e2, a, box, 0.2, x1, 0.0, 200);
  int reached = 0;
  for (const auto& rec : k.trace)
    if (rec.z.coords().norm() <= 1e-6) {
      reached = rec.k;
      break;
    }
  c.expect(reached > 0 && reached <= 200, "Korpelevich did not reach 1e-6 within 200 iterations");

  const Schedule<double> s{Seq::constant(1.0 / 3), Seq::constant(1.0 / 3), Seq::constant(1.0 / 3), Seq::constant(1), 0.2,
                           1};
  SolverOptions<double> opts;
  opts.stop_tol = 1e-12;
  opts.max_iters = 2000;
  const auto cor = solve_corollary(e2, box, a, Map::identity(e2), std::optional<P>(P::zero(2)), s, x1, opts);
  c.expect(cor.status == SolveStatus::converged, std::string("corollary status ") + to_string(cor.status));
  c.expect_le((cor.final_point - k.final_point).coords().norm(), 1e-6, "corollary vs Korpelevich limit");
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)(Criterion&)> criteria[] = {
      {"first iteration of both presets", first_step},
      {"recurrence oracle and known erratum", recurrence},
      {"strong convergence and tail rate", strong_convergence},
      {"phi monotonicity", phi_monotone},
      {"geometry property suite", geometry},
      {"projection suite", projection},
      {"resolvent suite", resolvent},
      {"hypothesis checker", checker},
      {"baseline and corollary", baseline},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [title, fn] : criteria) {
    Criterion c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s (%s)\n", c.passed() ? "PASS" : "FAIL", index++, title, c.summary().c_str());
    if (!c.passed()) ++failed;
  }
  std::printf("%d of %d criteria passed\n", index - 1 - failed, index - 1);
  return failed == 0 ? 0 : 1;
}
