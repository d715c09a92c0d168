// Exact arc moments of the uniform distribution over DAGs, n = 2..6.

#include "graphvar/census.hpp"
#include "graphvar/edgedist.hpp"
#include "graphvar/measures.hpp"

#include <cstdio>

using namespace graphvar;

int main() {
    std::printf("%2s %9s %10s %10s %10s %10s %10s\n", "n", "DAGs", "p(+1)", "p(0)", "VAR", "|COV|", "approx p");
    for (int n = 2; n <= 6; ++n) {
        const auto t = trinomial_from_census(census_dags(n));
        const double cov = t.k > 1 ? std::abs(t.sigma(0, 1)) : 0.0;
        std::printf("%2d %9llu %10.6f %10.6f %10.6f %10.6f %10.6f\n", n,
                    static_cast<unsigned long long>(t.sample_count), t.marginals[0][2], t.marginals[0][1],
                    t.sigma(0, 0), cov, approximate_maxent_marginals(n)[2]);
    }
}
