#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ettx/assignment.hpp"
#include "ettx/core.hpp"

namespace ettx {

// Persistent rope over output letters: O(1) concatenation, linear flatten.
struct RopeNode {
    Doc text;
    std::shared_ptr<const RopeNode> l, r;
};
using RopePtr = std::shared_ptr<const RopeNode>;

RopePtr rope_text(Doc d);
RopePtr rope_cat(RopePtr a, RopePtr b); // either side may be null
void rope_flatten(const RopePtr& r, Doc& out);

// Append-only DAG of valuation sets. Node kinds:
//   Leaf    one valuation
//   Apply   child's valuations composed with a copyless assignment
//   Relabel Apply whose assignment maps registers to single registers
//   Union   multiset union of both children
// Sharing makes nodes persistent: references stay valid across later ops.
enum class NodeKind : std::uint8_t { Leaf, Apply, Relabel, Union };

using NodeRef = std::uint32_t;

struct EcsaNode {
    NodeKind kind;
    Assignment label; // unused for Union
    NodeRef l = 0, r = 0;
    int odepth = 0; // Union/Relabel left-nesting depth, bounded by 4
};

class Ecsa {
public:
    NodeRef leaf(const Valuation& v);
    NodeRef extend(NodeRef n, const Assignment& s);
    NodeRef unite(NodeRef a, NodeRef b);

    const EcsaNode& node(NodeRef n) const { return nodes_[n]; }
    std::size_t size() const { return nodes_.size(); }
    int odepth(NodeRef n) const { return nodes_[n].odepth; }

    // Shape audit: relabels never stack, odepth stays within the bound that
    // keeps enumeration delay independent of the DAG size.
    bool check_safe(NodeRef n) const;

    Bag<Valuation> materialize(NodeRef n) const; // brute force, for testing

    std::string dump() const; // "id kind label left right" per line

    // Streams the valuations of a node. The accumulated assignment keeps
    // letter runs in ropes and at most one occurrence of each register, so a
    // step costs O(registers) plus emitted letters.
    class Cursor {
    public:
        bool next(Valuation& out);
        std::uint64_t steps() const { return steps_; }

    private:
        friend class Ecsa;
        struct Piece {
            RopePtr chunk; // null means register reference
            Reg ref;
        };
        using SymAssign = std::map<Reg, std::vector<Piece>>;
        struct Frame {
            NodeRef n;
            SymAssign acc;
        };

        Cursor(const Ecsa* e, NodeRef n);
        SymAssign compose(const SymAssign& acc, const Assignment& s);

        const Ecsa* e_ = nullptr;
        std::vector<Frame> stack_;
        std::uint64_t steps_ = 0;
    };

    Cursor cursor(NodeRef n) const { return Cursor(this, n); }

private:
    NodeRef push(EcsaNode n);
    // (relabel cap, left, right) of a union-shaped node, if it has one
    struct Shape {
        bool is_union = false;
        const Assignment* cap = nullptr; // null when bare
        NodeRef l = 0, r = 0;
    };
    Shape shape(NodeRef n) const;
    NodeRef cap_with(const Assignment* cap, NodeRef n);
    NodeRef mk_union(NodeRef a, NodeRef b);

    std::vector<EcsaNode> nodes_;
    std::set<Reg> universe_;
};

} // namespace ettx
