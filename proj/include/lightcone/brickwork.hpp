#pragma once

// Brickwork circuit layers on an open chain of N+1 qudits (N even).
// The even layer places the gate on pairs (0,1), (2,3), ..., (N-2,N-1) and
// leaves site N idle; the odd layer places it on (1,2), ..., (N-1,N) and
// leaves site 0 idle.

#include "lightcone/gates.hpp"
#include "lightcone/linalg.hpp"

namespace lightcone {

enum class LayerOrder { even_first, odd_first };

// Default convention: the first layer parity is tied to the parity of the
// observation window size M.
inline LayerOrder layer_order_for_window(int sites) {
    return (sites % 2 == 1) ? LayerOrder::even_first : LayerOrder::odd_first;
}

inline void check_chain_args(int d, int n, long size_cap = kMaxTensorDim) {
    if (n < 2 || n % 2 != 0)
        throw ValidationError("brickwork chain: N must be even and >= 2");
    long dim = 1;
    for (int s = 0; s <= n; ++s) {
        dim *= d;
        if (dim > size_cap)
            throw ValidationError("brickwork chain: d^(N+1) exceeds size cap");
    }
}

inline CMat brickwork_even_layer(const Gate& g, int n) {
    check_chain_args(g.local_dim, n);
    return tensor_product(tensor_power(g.matrix, n / 2),
                          CMat::Identity(g.local_dim, g.local_dim));
}

inline CMat brickwork_odd_layer(const Gate& g, int n) {
    check_chain_args(g.local_dim, n);
    return tensor_product(CMat::Identity(g.local_dim, g.local_dim),
                          tensor_power(g.matrix, n / 2));
}

// One Floquet period: the product of one even and one odd layer, the layer
// named by `order` acting first.
inline CMat build_floquet(const Gate& g, int n, LayerOrder order) {
    CMat even = brickwork_even_layer(g, n);
    CMat odd = brickwork_odd_layer(g, n);
    return order == LayerOrder::even_first ? CMat(odd * even) : CMat(even * odd);
}

}  // namespace lightcone
