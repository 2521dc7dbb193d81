#pragma once

#include <functional>
#include <map>
#include <optional>

#include "tsl/enclosure.hpp"
#include "tsl/finite_set.hpp"

namespace tsl {

/// Membership in A_k, S_n or S_n[A_2]. The empty set belongs to every family.
bool member(const FiniteSet& f, const FamilySpec& fam);

/// Least n with f in S_n, or nullopt when no finite n works (exactly the
/// sets with min 1 and at least two elements).
std::optional<int> schreier_rank(const FiniteSet& f);

/// Least n with f in S_n[A_2], or nullopt.
std::optional<int> compose_a2_rank(const FiniteSet& f);

/// True iff the block minima form a member of fam. Throws MalformedPartition
/// when blocks overlap or (non-modified) are not successive.
bool check_partition(const Partition& p, const FamilySpec& fam);

struct PartitionInfo {
    Partition partition;
    std::optional<int> minima_schreier_rank;  // rank of the minima set
    int block_count = 0;
};

struct EnumerationCaps {
    int non_modified = 16;
    int modified = 12;
};

/// Enumerates the candidate splittings of a support set (>= 2 blocks).
/// Non-modified: for every subset of >= 2 support points taken as block
/// minima, the blocks are the full support segments between consecutive
/// minima. Modified: every set partition of every subset of the support,
/// blocks listed in increasing order of their minima.
void enumerate_partitions(const FiniteSet& support, bool modified,
                          const std::function<void(const PartitionInfo&)>& yield,
                          const EnumerationCaps& caps = {});

/// sup over F in S_M (within the key set) of sum of weights over F.
/// Exact for rational weights. M = 0 reduces to the largest single weight.
Rational max_schreier_sum(const std::map<int, Rational>& weights, int M);

/// Splits F in S_r into successive pieces, each in S_(r-d), whose minima
/// form an S_d set. Requires F in S_r and 0 <= d <= r.
std::vector<FiniteSet> schreier_decompose(const FiniteSet& f, int r, int d);

/// Length of the maximal initial segment of elems[start..] lying in S_n.
std::size_t greedy_initial_segment(const std::vector<int>& elems, std::size_t start, int n);

/// The maximal S_n subset of {start, start+1, ...}: the integer interval
/// filled by greedy packing. Guarded by a size cap.
FiniteSet maximal_schreier_interval(int start, int n, std::size_t cap = 4096);

}  // namespace tsl
