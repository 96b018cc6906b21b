#pragma once

#include "quiver/property.hpp"

#include <optional>
#include <string>
#include <vector>

namespace quiver {

// Untyped command AST straight from the parser; the session binds names and
// constants against the catalog.

namespace ddl {

struct Operand {
    enum class Kind { Ref, Number, Word, Str };
    Kind kind = Kind::Number;
    std::string var, prop; // Ref
    std::string text;      // Word / Str
    double num = 0;
    bool is_int = false;
    int64_t inum = 0;
    // optional "+ c" on the operand (constant or the alpha parameter)
    bool has_offset = false;
    double offset = 0;
    std::string offset_word;
};

struct TextAtom {
    Operand lhs;
    CmpOp op = CmpOp::Eq;
    Operand rhs;
    uint32_t line = 0, col = 0;
};

struct PatternNode {
    std::string name;
    std::string label; // empty = none
};

struct PatternEdge {
    std::string name;  // empty = anonymous
    std::string label; // empty = none
    int from = -1, to = -1;
};

struct MatchClause {
    std::vector<PatternNode> nodes;
    std::vector<PatternEdge> edges;
    std::vector<TextAtom> where;
};

struct CriterionText {
    std::string subject; // e_adj / v_nbr / e_b / v_s / v_d
    std::string prop;
};

struct Command {
    enum class Type {
        Load,
        ReconfigurePrimary,
        Create1Hop,
        Create2Hop,
        DropIndex,
        Match,
        Explain,
        Stats,
        ShowIndexes,
        Flush,
        Export,
        Set,
        Quit,
        Help,
    };
    Type type = Type::Stats;

    std::string vertex_file, edge_file, schema_file; // Load / Export
    std::string view_name;                           // Create / Drop
    std::string direction;                           // "FW"|"BW"|"FW-BW"
    bool has_index_as = false;
    std::vector<CriterionText> partition_by;
    std::vector<CriterionText> sort_by;
    MatchClause match; // Create view pattern, Match, Explain

    std::string flush_index; // empty = all
    int64_t flush_owner = -1;

    std::string set_name;
    double set_value = 0;
};

// Parses one command. Throws Error(ParseError) with line/column context.
Command parse(const std::string& text);

} // namespace ddl

} // namespace quiver
