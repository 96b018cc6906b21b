#include "quiver/csr_common.hpp"

#include <algorithm>

namespace quiver {

uint8_t offset_width_for_length(uint32_t longest) {
    uint8_t width = 1;
    uint64_t capacity = 256;
    while (longest >= capacity) {
        ++width;
        capacity <<= 8;
    }
    return width;
}

uint64_t read_packed(const std::vector<uint8_t>& bytes, uint64_t index, uint8_t width) {
    uint64_t value = 0;
    const uint64_t base = index * width;
    for (uint8_t b = 0; b < width; ++b)
        value |= static_cast<uint64_t>(bytes[base + b]) << (8 * b);
    return value;
}

void append_packed(std::vector<uint8_t>& bytes, uint8_t width, uint64_t value) {
    for (uint8_t b = 0; b < width; ++b)
        bytes.push_back(static_cast<uint8_t>((value >> (8 * b)) & 0xff));
}

namespace {

uint32_t keyspace_for(const PropertyGraph& graph, const PartitioningCriterion& crit) {
    if (crit.property == kLabelProp) {
        const Dictionary& dict = crit.subject == Subject::AdjEdge
                                     ? graph.catalog().edge_labels()
                                     : graph.catalog().vertex_labels();
        return dict.size() + 1;
    }
    const Attachment attach =
        crit.subject == Subject::AdjEdge ? Attachment::Edge : Attachment::Vertex;
    const PropertyDef& def = graph.catalog().require(crit.property, attach);
    return def.codes.size() + 1;
}

} // namespace

LevelLayout::LevelLayout(const PropertyGraph& graph,
                         const std::vector<PartitioningCriterion>& criteria) {
    for (const PartitioningCriterion& crit : criteria)
        levels_.push_back(Level{crit, keyspace_for(graph, crit)});
}

uint64_t LevelLayout::slots_at(size_t depth) const {
    uint64_t slots = 1;
    for (size_t j = 0; j < depth; ++j) slots *= levels_[j].keyspace;
    return slots;
}

std::optional<uint32_t> LevelLayout::slot_of_value(size_t level,
                                                   const PropertyValue& value) const {
    const uint32_t keyspace = levels_[level].keyspace;
    if (value.is_null()) return keyspace - 1;
    if (value.tag() != PropertyValue::Tag::Categorical) return std::nullopt;
    const uint32_t code = value.as_categorical();
    if (code >= keyspace - 1) return std::nullopt;
    return code;
}

PropertyValue LevelLayout::entry_value(size_t level, const EvalContext& ctx) const {
    const PartitioningCriterion& crit = levels_[level].criterion;
    return resolve_ref(ctx, PropRef{crit.subject, crit.property});
}

uint32_t LevelLayout::entry_slot(size_t level, const EvalContext& ctx) const {
    const PropertyValue value = entry_value(level, ctx);
    const uint32_t keyspace = levels_[level].keyspace;
    if (value.is_null()) return keyspace - 1;
    const uint32_t code = value.as_categorical();
    return code < keyspace - 1 ? code : keyspace - 1;
}

bool LevelLayout::covers_catalog(const PropertyGraph& graph) const {
    for (const Level& level : levels_)
        if (keyspace_for(graph, level.criterion) > level.keyspace) return false;
    return true;
}

bool sort_values_less(const std::vector<PropertyValue>& a_vals, uint32_t a_nbr,
                      uint64_t a_edge, const std::vector<PropertyValue>& b_vals,
                      uint32_t b_nbr, uint64_t b_edge) {
    for (size_t i = 0; i < a_vals.size() && i < b_vals.size(); ++i) {
        const int cmp = order_compare(a_vals[i], b_vals[i]);
        if (cmp != 0) return cmp < 0;
    }
    if (a_nbr != b_nbr) return a_nbr < b_nbr;
    return a_edge < b_edge;
}

BuiltGroup build_group(std::vector<BuildEntry> entries, const LevelLayout& layout) {
    std::sort(entries.begin(), entries.end(),
              [&](const BuildEntry& a, const BuildEntry& b) {
                  if (a.slot != b.slot) return a.slot < b.slot;
                  for (size_t j = 0; j < layout.depth(); ++j)
                      if (a.key_slots[j] != b.key_slots[j])
                          return a.key_slots[j] < b.key_slots[j];
                  return sort_values_less(a.sort_values, a.nbr, a.edge, b.sort_values,
                                          b.nbr, b.edge);
              });

    BuiltGroup group;
    group.levels.resize(layout.depth() + 1);
    group.edge_ids.reserve(entries.size());
    group.nbr_ids.reserve(entries.size());
    group.aux.reserve(entries.size());
    for (const BuildEntry& e : entries) {
        group.edge_ids.push_back(e.edge);
        group.nbr_ids.push_back(e.nbr);
        group.aux.push_back(e.aux);
    }

    for (size_t depth = 0; depth <= layout.depth(); ++depth) {
        const uint64_t slots = kGroupSize * layout.slots_at(depth);
        std::vector<uint32_t> counts(slots, 0);
        for (const BuildEntry& e : entries) {
            uint64_t flat = e.slot;
            for (size_t j = 0; j < depth; ++j)
                flat = flat * layout.levels()[j].keyspace + e.key_slots[j];
            ++counts[flat];
        }
        std::vector<uint32_t>& offsets = group.levels[depth];
        offsets.resize(slots + 1, 0);
        for (uint64_t s = 0; s < slots; ++s) offsets[s + 1] = offsets[s] + counts[s];
    }
    return group;
}

uint32_t longest_list(const BuiltGroup& group) {
    uint32_t longest = 0;
    for (uint32_t slot = 0; slot < kGroupSize; ++slot)
        longest = std::max(longest, group.owner_length(slot));
    return longest;
}

} // namespace quiver
