#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "physical_params.hpp"

namespace cavspin {

/// How the qualitative inequalities are quantified.
///   "x >> y"  : x / y >= much_greater
///   "x ~ y"   : max(x,y) / min(x,y) <= similar
///   "x >~ y"  : x >= y
struct RegimeThresholds {
  double much_greater = 10.0;
  double similar = 3.0;
  double condition1_tolerance = 1e-3;  ///< relative mismatch allowed in g1^2/Delta1 = g2^2/Delta2
  double budget_margin = 10.0;         ///< gamma must be <= bound / margin
};

struct RegimeRatio {
  std::string name;  ///< the inequality, e.g. "Delta1 >> sqrt(M/2) g1"
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
  double threshold = 0.0;
  bool ok = true;
};

struct RegimeReport {
  bool condition1_ok = true;  ///< equal Stark shifts
  bool condition2_ok = true;  ///< detuning / coupling / hopping / drive hierarchy
  bool condition3_ok = true;  ///< frequency separation
  bool budget_ok = true;      ///< decoherence budget
  std::vector<RegimeRatio> ratios;
  std::vector<std::string> messages;

  bool all_ok() const { return condition1_ok && condition2_ok && condition3_ok && budget_ok; }

  bool flags(const std::string& inequality) const {
    return std::any_of(ratios.begin(), ratios.end(), [&](const auto& r) { return r.name == inequality && !r.ok; });
  }
};

struct BudgetResult {
  bool ok = true;
  double lhs = 0.0;  ///< gamma
  double rhs = 0.0;  ///< min_j J/(2N) (Delta_j / (sqrt(M/2) g_j))^2
};

/// gamma << J/(2N) (Delta_j / (sqrt(M/2) g_j))^2 with the smaller of the two
/// bounds, quantified as gamma <= rhs / margin.
inline BudgetResult decoherence_budget(const PhysicalParams& p, int n_cavities, double margin = 10.0) {
  const double h = std::sqrt(p.M / 2.0);
  auto bound = [&](double Delta, double g) {
    const double x = h * std::abs(g);
    if (x == 0.0) return std::numeric_limits<double>::infinity();
    const double r = Delta / x;
    return p.J / (2.0 * n_cavities) * r * r;
  };
  BudgetResult b;
  b.lhs = p.gamma;
  b.rhs = std::min(bound(p.Delta1, p.g1), bound(p.Delta2, p.g2));
  b.ok = p.gamma == 0.0 || p.gamma * margin <= b.rhs;
  return b;
}

namespace detail {

class RegimeBuilder {
 public:
  explicit RegimeBuilder(RegimeReport& r) : r_(r) {}

  /// num / den >= threshold; den == 0 counts as satisfied.
  bool much(const std::string& name, double num, double den, double threshold) {
    const double ratio = den == 0.0 ? std::numeric_limits<double>::infinity() : num / den;
    return add(name, num, den, ratio, threshold, ratio >= threshold, ">> needs ratio >= ");
  }
  /// max/min <= threshold
  bool similar(const std::string& name, double x, double y, double threshold) {
    const double lo = std::min(x, y), hi = std::max(x, y);
    const double ratio = lo <= 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
    return add(name, x, y, ratio, threshold, ratio <= threshold, "~ needs ratio <= ");
  }
  bool at_least(const std::string& name, double x, double y) {
    const double ratio = y == 0.0 ? std::numeric_limits<double>::infinity() : x / y;
    return add(name, x, y, ratio, 1.0, x >= y, ">~ needs ratio >= ");
  }
  bool at_most(const std::string& name, double x, double y, double threshold) {
    const double ratio = y == 0.0 ? 0.0 : x / y;
    return add(name, x, y, ratio, threshold, ratio <= threshold, "needs ratio <= ");
  }

 private:
  bool add(const std::string& name, double num, double den, double ratio, double thr, bool ok, const char* what) {
    r_.ratios.push_back({name, num, den, ratio, thr, ok});
    if (!ok) r_.messages.push_back("violated: " + name + " (ratio " + std::to_string(ratio) + ", " + what + std::to_string(thr) + ")");
    return ok;
  }
  RegimeReport& r_;
};

}  // namespace detail

/// Evaluates the elimination-regime conditions
///   (1) g1^2/Delta1 = g2^2/Delta2
///   (2) Delta_j, |Delta1 - Delta2| >> sqrt(M/2) g_j >> J >~ |Omega_j|
///   (3) lambda ~ |lambda +- omega| ~ |omega| >> 2J   (lambda = M g1^2/Delta1)
/// and the decoherence budget. Every individual inequality is recorded.
inline RegimeReport check_conditions(const PhysicalParams& p, const RegimeThresholds& th = {}, int n_cavities = 1) {
  RegimeReport rep;
  detail::RegimeBuilder b(rep);
  const double r = th.much_greater, s = th.similar;

  const double s1 = p.g1 * p.g1 / p.Delta1, s2 = p.g2 * p.g2 / p.Delta2;
  const double scale = std::max(std::abs(s1), std::abs(s2));
  rep.condition1_ok = b.at_most("g1^2/Delta1 = g2^2/Delta2", std::abs(s1 - s2), scale, th.condition1_tolerance);

  const double h = std::sqrt(p.M / 2.0);
  const double x1 = h * std::abs(p.g1), x2 = h * std::abs(p.g2);
  const double dd = std::abs(p.Delta1 - p.Delta2);
  bool c2 = true;
  c2 &= b.much("Delta1 >> sqrt(M/2) g1", std::abs(p.Delta1), x1, r);
  c2 &= b.much("Delta2 >> sqrt(M/2) g2", std::abs(p.Delta2), x2, r);
  c2 &= b.much("|Delta1 - Delta2| >> sqrt(M/2) g1", dd, x1, r);
  c2 &= b.much("|Delta1 - Delta2| >> sqrt(M/2) g2", dd, x2, r);
  c2 &= b.much("sqrt(M/2) g1 >> J", x1, p.J, r);
  c2 &= b.much("sqrt(M/2) g2 >> J", x2, p.J, r);
  c2 &= b.at_least("J >~ |Omega1|", p.J, std::abs(p.Omega1));
  c2 &= b.at_least("J >~ |Omega2|", p.J, std::abs(p.Omega2));
  if (p.Omega3 != Complex{}) c2 &= b.at_least("J >~ |Omega3|", p.J, std::abs(p.Omega3));
  if (p.Omega4 != Complex{}) c2 &= b.at_least("J >~ |Omega4|", p.J, std::abs(p.Omega4));
  rep.condition2_ok = c2;

  const double lam = std::abs(p.M * s1), w = std::abs(p.omega);
  const double lp = std::abs(p.M * s1 + p.omega), lm = std::abs(p.M * s1 - p.omega);
  bool c3 = true;
  c3 &= b.similar("lambda ~ |lambda + omega|", lam, lp, s);
  c3 &= b.similar("lambda ~ |lambda - omega|", lam, lm, s);
  c3 &= b.similar("lambda ~ |omega|", lam, w, s);
  c3 &= b.similar("|lambda + omega| ~ |omega|", lp, w, s);
  c3 &= b.similar("|lambda - omega| ~ |omega|", lm, w, s);
  c3 &= b.much("|omega| >> 2J", w, 2.0 * p.J, r);
  rep.condition3_ok = c3;

  const BudgetResult bud = decoherence_budget(p, n_cavities, th.budget_margin);
  rep.ratios.push_back({"gamma << J/(2N) (Delta_j/(sqrt(M/2) g_j))^2", bud.lhs, bud.rhs,
                        bud.rhs == 0.0 ? std::numeric_limits<double>::infinity() : bud.lhs / bud.rhs,
                        1.0 / th.budget_margin, bud.ok});
  if (!bud.ok)
    rep.messages.push_back("violated: gamma << J/(2N) (Delta_j/(sqrt(M/2) g_j))^2 (gamma = " + std::to_string(bud.lhs) +
                           ", bound = " + std::to_string(bud.rhs) + ", margin " + std::to_string(th.budget_margin) + ")");
  rep.budget_ok = bud.ok;
  return rep;
}

}  // namespace cavspin
