// Enumerate the low blocks of the 1-form Laplacian on H^3 at k = 1 and
// reconcile every eigenvalue against the closed-form catalog.
#include <cstdio>

#include "hlap/catalog.hpp"
#include "hlap/heisenberg.hpp"

using namespace hlap;

int main() {
    const int n = 1, p = 1;
    const double k = 1.0;
    heisenberg::HeisenbergContext ctx(n, k, p);

    std::printf("blocks of Delta_{%d,%d}(k=%g):\n", p, n, k);
    for (const auto& gamma : heisenberg::enumerate_gammas(ctx, 3)) {
        auto spec = heisenberg::block_spectrum(ctx, gamma);
        std::printf("  gamma=%s dim=%d eigenvalues:", gamma.str().c_str(), spec.total_dim());
        for (double v : spec.raw) std::printf(" %.12f", v);
        std::printf("\n");
    }

    auto numeric = catalog::numeric_spectrum(n, p, k, 4);
    auto report = catalog::match_spectrum(numeric, n, p, k, 2);
    std::printf("catalog match: %zu eigenvalues matched, %zu numeric orphans, %zu catalog orphans\n",
                report.matched, report.orphan_numeric.size(), report.orphan_catalog.size());
    return report.clean() ? 0 : 1;
}
