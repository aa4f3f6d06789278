// Bias of the averaging operator on the unit circle as h shrinks, next to
// one Monte Carlo graph Laplacian at each bandwidth.

#include <cstdio>
#include <vector>

#include <graphlap/graphlap.hpp>

int main() {
  using namespace graphlap;
  const auto circle = EmbeddedManifold::circle(1.0);
  const auto f = TestFunction::parse(circle, "cos");
  const auto p = circle.at(0.0);
  const double target = laplacian_target(f, p);
  const Sample sample = sample_uniform(circle, 100000, 42);

  std::printf("%8s %14s %14s %14s\n", "h", "averaging", "graph", "bias");
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const auto avg = averaging_operator(p, f, Bandwidth{h}, circle);
    const double mc = graph_laplacian_at(p, sample, f, Bandwidth{h});
    std::printf("%8.4f %14.8f %14.8f %14.3e\n", h, avg.value, mc,
                avg.value - target);
  }
  std::printf("target (1/|mu|) Delta f(p) = %.8f\n", target);
}
