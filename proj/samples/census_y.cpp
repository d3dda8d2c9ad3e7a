// Corank census of the Y locus of a random Lagrangian over GF(q).
//
//   sample_census_y [q] [seed]

#include <cstdlib>
#include <iostream>

#include "atlas/atlas.hpp"

int main(int argc, char** argv) {
  using namespace atlas;
  const std::uint64_t q = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 5;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  try {
    const PrimeField f(q);
    const auto sc = screened_census(f, Flavor::Y, seed, 10'000'000);
    for (const auto& d : sc.discarded) std::cout << "discarded seed " << d.seed << ": " << d.reason << "\n";
    std::cout << "GF(" << q << "), seed " << sc.seed << ", " << sc.census.total << " points\n";
    for (std::size_t k = 0; k <= sc.census.max_corank; ++k)
      std::cout << "  corank " << k << ": " << sc.census.histogram[k] << "\n";
    return sc.census.at_least(forbidden_corank(Flavor::Y)) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
