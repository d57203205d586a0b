#include "subfk/stats.hpp"

namespace subfk {

void RunningStats::merge(const RunningStats& o)
{
    if (o.n == 0) return;
    if (n == 0) {
        *this = o;
        return;
    }
    double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    double nt = na + nb;
    double d = o.mean - mean;
    mean += d * nb / nt;
    m2 += o.m2 + d * d * na * nb / nt;
    n += o.n;
}

}  // namespace subfk
