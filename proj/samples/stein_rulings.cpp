// Rational rulings against the signed discriminant for every nondegenerate
// symmetric form of a given even size over GF(q).
//
//   sample_stein_rulings [q] [size]

#include <cstdlib>
#include <iostream>

#include "atlas/atlas.hpp"

int main(int argc, char** argv) {
  using namespace atlas;
  const std::uint64_t q = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 3;
  const std::size_t size = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 4;
  try {
    const PrimeField f(q);
    Rng rng(1);
    const auto s = stein_check(f, size, 10'000'000, rng, 10'000);
    std::cout << s.forms << " forms, " << s.nondegenerate << " nondegenerate: " << s.split << " split, " << s.inert
              << " inert\n"
              << s.tally.disagreements << " disagreements\n";
    return s.tally.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
