#include "mcd/rng.hpp"

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

namespace mcd {

int draw_binomial(Engine& engine, int trials, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    boost::random::binomial_distribution<int, double> dist(trials, p);
    return dist(engine);
}

int draw_poisson(Engine& engine, double mean) {
    if (mean <= 0.0) return 0;
    boost::random::poisson_distribution<int, double> dist(mean);
    return dist(engine);
}

double draw_normal(Engine& engine, double mean, double sd) {
    boost::random::normal_distribution<double> dist(mean, sd);
    return dist(engine);
}

}  // namespace mcd
