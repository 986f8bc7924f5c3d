#include <stdexcept>

#include "picnn/constructions.hpp"

namespace picnn::construct {

double requ_pair(double x, double y) {
    return (requ(x + y) + requ(-x - y) - requ(x - y) - requ(-x + y)) / 4.0;
}

int ProductNetwork::neurons() const {
    int n = 0;
    for (const auto& level : levels) n += 4 * static_cast<int>(level.size());
    return n;
}

double ProductNetwork::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != inputs) throw std::invalid_argument("product network input size mismatch");
    std::vector<double> cur(x.begin(), x.end());
    for (const auto& level : levels) {
        std::vector<double> next;
        next.reserve(level.size());
        for (const auto& [a, b] : level) {
            const double u = a < 0 ? 1.0 : cur[a];
            const double v = b < 0 ? 1.0 : cur[b];
            next.push_back(requ_pair(u, v));
        }
        cur = std::move(next);
    }
    return cur.front();
}

ProductNetwork requ_product_network(int n) {
    if (n < 2) throw std::invalid_argument("product network needs at least two inputs");
    ProductNetwork net;
    net.inputs = n;
    // Padding with the constant 1 happens only on the first level, and the
    // padded slots are spread evenly. Every later level then multiplies
    // partial products of nearly equal leaf counts, which keeps the
    // cancellation in the pair identity small.
    int slots = 1;
    while (2 * slots < n) slots *= 2;
    const int pairs = n - slots;
    std::vector<std::pair<int, int>> first;
    int leaf = 0;
    for (int i = 0; i < slots; ++i) {
        const bool pair = (static_cast<long>(i + 1) * pairs) / slots > (static_cast<long>(i) * pairs) / slots;
        if (pair) {
            first.emplace_back(leaf, leaf + 1);
            leaf += 2;
        } else {
            first.emplace_back(leaf, -1);
            leaf += 1;
        }
    }
    net.levels.push_back(std::move(first));
    for (int width = slots; width > 1; width /= 2) {
        std::vector<std::pair<int, int>> level;
        for (int i = 0; i < width; i += 2) level.emplace_back(i, i + 1);
        net.levels.push_back(std::move(level));
    }
    return net;
}

double requ_product(std::span<const double> xs) {
    return requ_product_network(static_cast<int>(xs.size())).evaluate(xs);
}

}  // namespace picnn::construct
