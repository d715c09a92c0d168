// Eigenvalue geometry of three two-edge distributions: where each covariance
// sits relative to the minimum- and maximum-entropy points.

#include "graphvar/edgedist.hpp"
#include "graphvar/spectral.hpp"

#include <cstdio>

using namespace graphvar;

int main() {
    // Edge sets over pairs {0,1} and {0,2} of a three-node graph.
    const std::vector<std::vector<VertexPair>> sets{{}, {{0, 2}}, {{0, 1}}, {{0, 1}, {0, 2}}};
    const std::vector<std::vector<double>> cells{{0.2, 0.2, 0.2, 0.4}, {0.0, 0.12, 0.28, 0.6}};
    std::vector<Matrix> sigmas;
    for (const auto& w : cells) {
        const auto b = fit_bernoulli_distribution(3, sets, w);
        Matrix s(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) s(i, j) = b.sigma(i, j);
        sigmas.push_back(s);
    }
    Matrix strong(2, 2);
    strong(0, 0) = 0.1056;
    strong(1, 1) = 0.2016;
    strong(0, 1) = strong(1, 0) = 0.1456;
    sigmas.push_back(strong);

    std::printf("%-4s %9s %9s %9s %9s %9s\n", "", "lambda1", "lambda2", "cor", "d(0)", "d(max)");
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        const auto s = eigenvalues_symmetric(sigmas[i]);
        const auto p = simplex_position(s);
        std::printf("B%-3zu %9.4f %9.4f %9.4f %9.4f %9.4f\n", i + 1, s.eigenvalues[0], s.eigenvalues[1],
                    correlation(sigmas[i], 0, 1), p.distance_to_origin, p.distance_to_maxent);
    }
}
