#include <iomanip>
#include <limits>
#include <vector>

#include "scvx/conic.hpp"

namespace scvx {

void write_cbf(const ConeProblem& prob, std::ostream& out) {
  prob.validate();
  const int n = prob.num_vars();
  const auto p = static_cast<int>(prob.b.size());
  const auto m = static_cast<int>(prob.h.size());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);

  out << "VER\n3\n\nOBJSENSE\nMIN\n\nVAR\n" << n << " 1\nF " << n << "\n\n";

  int blocks = (p > 0 ? 1 : 0) + (prob.l > 0 ? 1 : 0) + static_cast<int>(prob.soc_dims.size());
  out << "CON\n" << p + m << ' ' << blocks << '\n';
  if (p > 0) out << "L= " << p << '\n';
  if (prob.l > 0) out << "L+ " << prob.l << '\n';
  for (int q : prob.soc_dims) out << "Q " << q << '\n';
  out << '\n';

  std::vector<std::pair<int, double>> obj;
  for (int j = 0; j < n; ++j) {
    if (prob.c[j] != 0.0) obj.emplace_back(j, prob.c[j]);
  }
  if (!obj.empty()) {
    out << "OBJACOORD\n" << obj.size() << '\n';
    for (const auto& [j, v] : obj) out << j << ' ' << v << '\n';
    out << '\n';
  }
  if (prob.objective_offset != 0.0) {
    out << "OBJBCOORD\n" << prob.objective_offset << "\n\n";
  }

  // Rows: A x - b in L=, then -G x + h in K.
  struct Entry {
    int i, j;
    double v;
  };
  std::vector<Entry> a;
  for (int j = 0; j < prob.A.outerSize(); ++j) {
    for (SpMat::InnerIterator it(prob.A, j); it; ++it) a.push_back({static_cast<int>(it.row()), j, it.value()});
  }
  for (int j = 0; j < prob.G.outerSize(); ++j) {
    for (SpMat::InnerIterator it(prob.G, j); it; ++it) {
      a.push_back({p + static_cast<int>(it.row()), j, -it.value()});
    }
  }
  if (!a.empty()) {
    out << "ACOORD\n" << a.size() << '\n';
    for (const auto& e : a) out << e.i << ' ' << e.j << ' ' << e.v << '\n';
    out << '\n';
  }
  std::vector<std::pair<int, double>> bc;
  for (int i = 0; i < p; ++i) {
    if (prob.b[i] != 0.0) bc.emplace_back(i, -prob.b[i]);
  }
  for (int i = 0; i < m; ++i) {
    if (prob.h[i] != 0.0) bc.emplace_back(p + i, prob.h[i]);
  }
  if (!bc.empty()) {
    out << "BCOORD\n" << bc.size() << '\n';
    for (const auto& [i, v] : bc) out << i << ' ' << v << '\n';
  }
}

}  // namespace scvx
