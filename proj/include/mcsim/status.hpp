#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mcsim {

// Duplication status: bitmask over the members of a destination set.
// Bit k corresponds to the k-th member (d_{k+1}) of the set. A set bit means
// the packet copy still has to reach that destination. Status 0 (no remaining
// destination) is never stored as a queue.
using Status = std::uint32_t;

// State grows as 2^D, so destination sets are capped at a compile-visible bound.
inline constexpr int kMaxDestinations = 16;

inline int popcount(Status q) { return std::popcount(q); }

inline bool is_subset(Status s, Status q) { return (s & ~q) == 0; }

inline Status unit_bit(int k) { return Status{1} << k; }

inline Status full_status(int d) { return (Status{1} << d) - 1; }

struct Split {
    Status operated;  // status s of the copy operated on the interface
    Status reloaded;  // status r = q - s of the copy reloaded at the node
};

// All efficient splits of q: operated s is a nonzero subset of q, reloaded
// r = q - s. Includes the no-duplication case s = q. Ordered by ascending s.
inline std::vector<Split> duplication_splits(Status q) {
    if (q == 0) throw std::invalid_argument("duplication_splits: status 0 has no splits");
    std::vector<Split> out;
    // iterate nonzero subsets of q in increasing integer order
    for (Status s = (q & (~q + 1)); ; s = ((s - q) & q)) {
        out.push_back({s, static_cast<Status>(q & ~s)});
        if (s == q) break;
    }
    return out;
}

}  // namespace mcsim
