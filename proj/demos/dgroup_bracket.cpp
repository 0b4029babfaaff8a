// The double Heisenberg group D^6: lowest-eigenvalue bracket versus the
// numerically measured low spectrum of the 1-form Laplacian.
#include <cstdio>

#include "hlap/dgroup.hpp"

using namespace hlap;
using namespace hlap::dgroup;

int main() {
    DGroupContext ctx(1, nilpotent::CentralFunctional{1.0, 0.0});
    auto br = lowest_bracket(ctx.n, ctx.lambda.norm());
    std::printf("bracket for the lowest eigenvalue: (%.10f, %.10f)\n", br.lower, br.upper);
    std::printf("linear coefficient of |lambda|: %.10f (= 3 - sqrt 7 at n = 1)\n",
                br.linear_coefficient);

    auto low = global_low_spectrum(ctx, br.upper + 1.5, 6);
    std::printf("measured low spectrum (truncation drift %.2e):\n", low.truncation_drift);
    for (std::size_t i = 0; i < low.eigenvalues.size(); ++i)
        std::printf("  %.10f  x%d\n", low.eigenvalues[i], low.multiplicities[i]);
    return 0;
}
