// Largest (0,0) entry reachable after discarding C, over Haar samples and the
// forwarding circuit, next to the 2^(a-d) ceiling.
#include <cleanq/verify.hpp>

#include <cstdio>

int main() {
  using namespace cleanq;
  for (const RegisterLayout l : {RegisterLayout(1, 2, 1, 2), RegisterLayout(1, 3, 2, 2), RegisterLayout(2, 2, 1, 3)}) {
    const auto r = check_discard_nogo(l, 200, 1);
    std::printf("%-18s max entry %.6f  bound %.6f  forwarding %.6f\n", to_string(l).c_str(), r.observed, r.bound,
                entry00_direct(forwarding_unitary(l), l));
  }
}
