// Isotropic reduction and conversion to a quadratic family on a random
// pencil of Lagrangian pairs.
//
//   sample_lag_reduction [q] [n]

#include <cstdlib>
#include <iostream>

#include "atlas/atlas.hpp"

int main(int argc, char** argv) {
  using namespace atlas;
  const std::uint64_t q = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;
  const std::size_t n = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 3;
  try {
    const PrimeField f(q);
    Rng rng(1);
    const auto pair = random_linear_pair(f, n, 2, rng);
    const auto red = reduction_check(pair, rng, 500);
    std::cout << "reduction: " << red.points << " points, " << red.skipped << " skipped, "
              << red.coranks_kept.disagreements + red.signatures_kept.disagreements << " disagreements\n";
    std::cout << "  coranks:";
    for (std::size_t k = 0; k < red.coranks.size(); ++k) std::cout << " " << k << ":" << red.coranks[k];
    std::cout << "\n";
    const Mat<PrimeField> a3 = random_transverse_lagrangian(pair, {f.one(), f.zero()}, rng);
    const auto conv = conversion_check(pair, a3, rng, 500);
    std::cout << "conversion: " << conv.points << " points, " << conv.not_transverse << " not transverse, "
              << conv.coranks.disagreements + conv.signatures.disagreements << " disagreements, symmetric "
              << (conv.symmetric ? "yes" : "no") << "\n";
    const bool ok = red.coranks_kept.ok() && red.signatures_kept.ok() && conv.symmetric && conv.coranks.ok() &&
                    conv.signatures.ok();
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
