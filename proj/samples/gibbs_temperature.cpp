// Distance of a Gibbs state to the ground projector as beta grows. Z is taken
// with the ground energy shifted to 0.
#include <cleanq/serialize.hpp>

#include <cmath>
#include <cstdio>

int main(int argc, char** argv) {
  using namespace cleanq;
  const Hamiltonian h = argc > 1 ? hamiltonian_from_json(read_json_file(argv[1])) : Hamiltonian::diagonal({0.0, 1.0});
  const auto ground = ground_projector(h);
  const double gap = spectral_gap(h).gap;
  std::printf("d=%d gap=%.4f  beta for eps'=0.1: %.4f\n", h.qubits(), gap, beta_threshold(h.qubits(), gap, 0.1));
  for (double beta : {0.5, 1.0, std::log(6.0), 3.0, 6.0})
    std::printf("beta %.4f  d(G, ground) %.6f  1-1/Z %.6f\n", beta, trace_distance(gibbs_state(h, beta), ground),
                1 - 1 / partition_function(h, beta));
}
