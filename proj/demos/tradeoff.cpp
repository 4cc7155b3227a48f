// Cost / out-of-sample violation table for the 39-bus case as the
// Wasserstein radius grows.
//
//   ./tradeoff [data-dir]

#include <cstdio>
#include <string>

#include "drlaed/drlaed.hpp"

using namespace drlaed;

int main(int argc, char **argv) {
  const std::string dir = argc > 1 ? argv[1] : DRLAED_DATA_DIR;
  try {
    const CompactProblem cp = assemble(io::load_network(dir + "/case39.json"));
    const SampleSet train = io::load_samples(dir + "/case39_train.csv");
    const SampleSet valid = io::load_samples(dir + "/case39_valid.csv");
    const std::vector<double> thetas = {0.0, 0.0025, 0.005, 0.01, 0.02, 0.04};

    std::printf("%-14s %8s %14s %10s\n", "method", "theta", "cost", "violation");
    for (Method m : {Method::WorstCase, Method::Drcvp, Method::DrccpRobust})
      for (const auto &r : sweep(m == Method::WorstCase ? std::vector<double>{0.0} : thetas, m, cp,
                                 train, valid))
        std::printf("%-14s %8g %14.2f %10.4f\n", to_string(m), r.theta, r.cost, r.violation_freq);
  } catch (const Error &e) {
    std::fprintf(stderr, "tradeoff: %s\n", e.what());
    return 1;
  }
}
