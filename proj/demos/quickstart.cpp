// Solve the bundled toy case with each method and score the schedules on
// the validation samples.
//
//   ./quickstart [data-dir]

#include <cstdio>
#include <string>

#include "drlaed/drlaed.hpp"

using namespace drlaed;

int main(int argc, char **argv) {
  const std::string dir = argc > 1 ? argv[1] : DRLAED_DATA_DIR;
  try {
    const Network net = io::load_network(dir + "/toy.json");
    const CompactProblem cp = assemble(net);
    const SampleSet train = io::load_samples(dir + "/toy_train.csv");
    const SampleSet valid = io::load_samples(dir + "/toy_valid.csv");
    io::check_labels(train, cp);

    std::printf("%-22s %14s %10s\n", "method", "cost", "violation");
    for (Method m : {Method::Scenario, Method::WorstCase, Method::Drcvp, Method::DrccpRobust}) {
      MethodSpec spec;
      spec.method = m;
      spec.ambiguity.theta = 0.02;
      spec.ambiguity.alpha = 0.05;
      const auto sol = solve_dispatch(spec, cp, train);
      if (!sol.optimal()) {
        std::printf("%-22s %14s\n", to_string(m), lp::to_string(sol.status));
        continue;
      }
      const auto rep = evaluate(sol.x, cp, valid);
      std::printf("%-22s %14.2f %10.4f\n", to_string(m), sol.objective, rep.violation_frequency);
    }
  } catch (const Error &e) {
    std::fprintf(stderr, "quickstart: %s\n", e.what());
    return 1;
  }
}
