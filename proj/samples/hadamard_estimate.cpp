// One-clean-qubit estimate of Re tr(U)/2^n for a circuit file (default: H on wire 0).
#include <cleanq/serialize.hpp>

#include <cstdio>

int main(int argc, char** argv) {
  using namespace cleanq;
  const Circuit c = argc > 1 ? circuit_from_json(read_json_file(argv[1])) : Circuit(2, {gate_h(0)});
  const Unitary u = assemble(c);
  const double exact = u.matrix().trace().real() / static_cast<double>(u.dim());
  for (std::uint64_t shots : {1000u, 10000u, 100000u})
    std::printf("shots %6llu  estimate %+.5f  exact %+.5f\n", static_cast<unsigned long long>(shots),
                hadamard_test(u, shots, 7), exact);
}
