#include "ouedge/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "ouedge/errors.hpp"

namespace ouedge {

namespace {

// Kronrod nodes (nonnegative half) and weights for the 15-point rule;
// odd-indexed nodes are the 7-point Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[static_cast<std::size_t>(i)];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[static_cast<std::size_t>(i)] * fsum;
    if (i % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(i / 2)] * fsum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol, int max_intervals) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate: bounds must be finite");
  if (a == b) return {};
  const double sign = a < b ? 1.0 : -1.0;
  if (a > b) std::swap(a, b);

  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  double value = first.value;
  double error = first.error;
  heap.push(first);

  while (error > std::max(abs_tol, rel_tol * std::abs(value)) &&
         static_cast<int>(heap.size()) < max_intervals) {
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // cannot split further
    heap.pop();
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the leaves to drop accumulated update rounding.
  QuadratureResult out;
  out.intervals = static_cast<int>(heap.size());
  std::vector<Segment> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  for (const auto& s : leaves) {
    out.value += s.value;
    out.error += s.error;
  }
  out.value *= sign;
  return out;
}

}  // namespace ouedge
