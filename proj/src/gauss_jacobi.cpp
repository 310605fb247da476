#include "dunklpot/gauss_jacobi.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>

#include "dunklpot/errors.hpp"

namespace dunklpot {

namespace {

QuadratureRule compute(int n, double a, double b) {
    Eigen::VectorXd diag(n), off(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k) {
        double s = 2.0 * k + a + b;
        diag[k] = (k == 0) ? (b - a) / (a + b + 2) : (b * b - a * a) / (s * (s + 2));
        if (k + 1 < n) {
            double j = k + 1;
            double t = 2 * j + a + b;
            double v = (j == 1) ? 4 * (1 + a) * (1 + b) / ((2 + a + b) * (2 + a + b) * (3 + a + b))
                                : 4 * j * (j + a) * (j + b) * (j + a + b) / (t * t * (t + 1) * (t - 1));
            off[k] = std::sqrt(v);
        }
    }
    QuadratureRule r;
    const double mu0 = std::exp((a + b + 1) * std::log(2.0) + std::lgamma(a + 1) + std::lgamma(b + 1) -
                                std::lgamma(a + b + 2));
    if (n == 1) {
        r.nodes = {diag[0]};
        r.weights = {mu0};
        return r;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off.head(n - 1), Eigen::ComputeEigenvectors);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return es.eigenvalues()[i] < es.eigenvalues()[j]; });
    for (int k : order) {
        r.nodes.push_back(es.eigenvalues()[k]);
        double v = es.eigenvectors()(0, k);
        r.weights.push_back(mu0 * v * v);
    }
    return r;
}

}  // namespace

const QuadratureRule& gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw InvalidArgument("rule needs at least one node");
    if (!(alpha > -1 && beta > -1)) throw InvalidArgument("Jacobi exponents must exceed -1");
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, alpha, beta);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<QuadratureRule>(compute(n, alpha, beta))).first;
    return *it->second;
}

}  // namespace dunklpot
