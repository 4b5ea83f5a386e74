#pragma once

#include <stdexcept>
#include <string>

namespace hjb {

// Time horizon of the Cauchy problem; all formulas are parametric in T.
struct Horizon {
  double T = 1.0;
};

struct SpacetimePoint {
  double t = 0.0;
  double x = 0.0;
};

// Subgradient candidate (p_t, p_x).
struct Costate {
  double pt = 0.0;
  double px = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Selector among the function families: the original sqrt-type phi, the
// Lipschitz "hat" phi, and the n-th member of the approximating sequence.
class ModelVariant {
 public:
  enum class Kind { Original, Hat, Approx };

  static ModelVariant original() { return ModelVariant(Kind::Original, 0); }
  static ModelVariant hat() { return ModelVariant(Kind::Hat, 0); }
  static ModelVariant approx(int n) {
    if (n < 1) throw std::invalid_argument("ModelVariant::approx: n must be >= 1");
    return ModelVariant(Kind::Approx, n);
  }

  Kind kind() const { return kind_; }
  int approx_n() const {
    if (kind_ != Kind::Approx) throw std::logic_error("approx_n on non-Approx variant");
    return n_;
  }

  std::string name() const {
    switch (kind_) {
      case Kind::Original: return "original";
      case Kind::Hat: return "hat";
      case Kind::Approx: return "approx:" + std::to_string(n_);
    }
    return "?";
  }

  friend bool operator==(const ModelVariant& a, const ModelVariant& b) {
    return a.kind_ == b.kind_ && a.n_ == b.n_;
  }

 private:
  ModelVariant(Kind k, int n) : kind_(k), n_(n) {}
  Kind kind_;
  int n_;
};

// Parses "original" | "hat" | "approx:<n>".
ModelVariant parse_variant(const std::string& s);

}  // namespace hjb
