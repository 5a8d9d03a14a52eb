#include "prs/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "prs/error.hpp"

namespace prs {

namespace {

// Dunavant symmetric rules, weights normalized to sum 1.
class RuleBuilder {
 public:
  explicit RuleBuilder(int degree) { rule_.degree = degree; }

  RuleBuilder& centroid(double w) {
    add({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, w);
    return *this;
  }
  // Orbit of (a, a, 1 - 2a).
  RuleBuilder& orbit3(double a, double w) {
    const double c = 1.0 - 2.0 * a;
    add({a, a, c}, w);
    add({a, c, a}, w);
    add({c, a, a}, w);
    return *this;
  }
  // Orbit of (a, b, 1 - a - b).
  RuleBuilder& orbit6(double a, double b, double w) {
    const double c = 1.0 - a - b;
    add({a, b, c}, w);
    add({a, c, b}, w);
    add({b, a, c}, w);
    add({b, c, a}, w);
    add({c, a, b}, w);
    add({c, b, a}, w);
    return *this;
  }
  TriangleRule build() const { return rule_; }

 private:
  void add(std::array<double, 3> p, double w) {
    rule_.points.push_back(p);
    rule_.weights.push_back(w);
  }
  TriangleRule rule_;
};

std::array<TriangleRule, max_triangle_rule_degree + 1> make_rules() {
  std::array<TriangleRule, max_triangle_rule_degree + 1> r;
  r[1] = RuleBuilder(1).centroid(1.0).build();
  r[2] = RuleBuilder(2).orbit3(1.0 / 6.0, 1.0 / 3.0).build();
  r[4] = RuleBuilder(4)
             .orbit3(0.44594849091596488631832925388305, 0.22338158967801146569500700843312)
             .orbit3(0.09157621350977074345957146340220, 0.10995174365532186763832632490021)
             .build();
  // Degree 3 Dunavant has a negative weight; use the degree 4 rule.
  r[3] = r[4];
  r[5] = RuleBuilder(5)
             .centroid(0.225)
             .orbit3(0.47014206410511508977044120951345, 0.13239415278850618073764938783315)
             .orbit3(0.10128650732345633880098736191512, 0.12593918054482715259568394550018)
             .build();
  r[6] = RuleBuilder(6)
             .orbit3(0.24928674517091042129163855310702, 0.11678627572637936602528961138558)
             .orbit3(0.06308901449150222834033160287082, 0.05084490637020681692093680910686)
             .orbit6(0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
                     0.08285107561837357519355345642044)
             .build();
  r[8] = RuleBuilder(8)
             .centroid(0.14431560767778716825109111048906)
             .orbit3(0.17056930775176020662229350149146, 0.10321737053471825028179155029212)
             .orbit3(0.05054722831703097545842355059660, 0.03245849762319808031092592834178)
             .orbit3(0.45929258829272315602881551449417, 0.09509163426728462479389610438858)
             .orbit6(0.26311282963463811342178578628464, 0.72849239295540428124100037917606,
                     0.02723031417443499426484469007390)
             .build();
  // Degree 7 Dunavant has a negative weight as well.
  r[7] = r[8];
  r[9] = RuleBuilder(9)
             .centroid(0.09713579628279609890744676309485)
             .orbit3(0.48968251919873762778370692483619, 0.03133470022713983234393199080984)
             .orbit3(0.43708959149293663726993036443535, 0.07782754100477543338465495857972)
             .orbit3(0.18820353561903273024096128046733, 0.07964773892720910288013526957424)
             .orbit3(0.04472951339445297061024247196780, 0.02557767565869810438673914467637)
             .orbit6(0.22196298916076569567510252769319, 0.74119859878449802069007987352342,
                     0.04328353937728937728937728937729)
             .build();
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static const auto rules = make_rules();
  if (degree < 1 || degree > max_triangle_rule_degree) {
    throw InvalidInput("triangle_rule: unsupported quadrature degree " + std::to_string(degree));
  }
  return rules[degree];
}

TriangleRule composite_rule(const TriangleRule& base, int s) {
  if (s < 1) throw InvalidInput("composite_rule: subdivision must be >= 1");
  if (s == 1) return base;
  using Bary = std::array<double, 3>;
  auto node = [s](int i, int j) -> Bary {
    const double a = static_cast<double>(i) / s;
    const double b = static_cast<double>(j) / s;
    return {1.0 - a - b, a, b};
  };
  TriangleRule out;
  out.degree = base.degree;
  const double scale = 1.0 / (static_cast<double>(s) * s);
  auto emit = [&](const Bary& v0, const Bary& v1, const Bary& v2) {
    for (std::size_t q = 0; q < base.size(); ++q) {
      const auto& l = base.points[q];
      Bary p{};
      for (int c = 0; c < 3; ++c) p[c] = l[0] * v0[c] + l[1] * v1[c] + l[2] * v2[c];
      out.points.push_back(p);
      out.weights.push_back(base.weights[q] * scale);
    }
  };
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i + j < s; ++i) {
      emit(node(i, j), node(i + 1, j), node(i, j + 1));
      if (i + j + 2 <= s) emit(node(i + 1, j), node(i + 1, j + 1), node(i, j + 1));
    }
  }
  return out;
}

LineRule gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("gauss_legendre: need at least one point");
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Map [-1, 1] -> [0, 1]; weights halve.
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace prs
