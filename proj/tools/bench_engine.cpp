// Compares the serial reference aggregation against the OpenMP kernel on an
// entry-game Monte Carlo workload and reports throughput and agreement.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "cpds/engine.hpp"

using namespace cpds;

namespace {

CounterfactualSpec bench_spec(Concept concept_kind) {
  CounterfactualSpec spec;
  spec.players = 2;
  spec.actions = ActionSpace({2, 2});
  LinearEntryTemplate tmpl;
  tmpl.base.alpha = {0.0, 0.0};
  tmpl.base.beta = {{1.0}, {1.0}};
  tmpl.base.delta = {{0.0, -1.0}, {-1.0, 0.0}};
  tmpl.base.x = {{0.0}, {0.0}};
  tmpl.base.epsilon = {0.0, 0.0};
  tmpl.bindings.push_back({"alpha", ThetaBinding::Target::alpha, -1, -1, -1, 0.25});
  spec.utility = std::move(tmpl);
  ParametricDist dist;
  ScalarDist x;
  x.kind = ScalarDist::Kind::normal;
  x.mean = 0.4375;
  x.sd = 0.25;
  ScalarDist eps;
  eps.kind = ScalarDist::Kind::normal;
  eps.mean = 0.0;
  eps.sd = 0.125;
  dist.x = {{x}, {x}};
  dist.epsilon = {eps, eps};
  spec.dist = std::move(dist);
  spec.solution_concept = concept_kind;
  spec.outcome = OutcomeSpec::min_entrants_event(spec.actions, 1);
  return spec;
}

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 50000;
  if (const char* env = std::getenv("CPDS_THREADS")) {
    int t = std::atoi(env);
    if (t > 0) omp_set_num_threads(t);
  }
  std::vector<double> theta = {0.25};

  for (Concept concept_kind : {Concept::mixed2x2, Concept::ce}) {
    CounterfactualSpec spec = bench_spec(concept_kind);
    EngineOptions parallel_opts;
    parallel_opts.partitions = 256;

    auto t0 = std::chrono::steady_clock::now();
    PartialCpds serial = partial_cpds_serial(spec, theta, n, 7);
    auto t1 = std::chrono::steady_clock::now();
    PartialCpds parallel = partial_cpds(spec, theta, n, 7, parallel_opts);
    auto t2 = std::chrono::steady_clock::now();

    double ts = seconds(t0, t1), tp = seconds(t1, t2);
    double drift = std::max(std::fabs(serial.e_sup - parallel.e_sup),
                            std::fabs(serial.e_inf - parallel.e_inf));
    std::printf(
        "%-8s n=%llu threads=%d  serial %.3fs (%.0f draws/s)  omp %.3fs (%.0f "
        "draws/s)  speedup %.2fx  |serial-omp| %.3g\n",
        concept_name(concept_kind), static_cast<unsigned long long>(n),
        omp_get_max_threads(), ts, n / ts, tp, n / tp, ts / tp, drift);
    if (drift > 1e-10) {
      std::fprintf(stderr, "serial and parallel kernels disagree\n");
      return 1;
    }
  }
  return 0;
}
