#pragma once

#include "quiver/database.hpp"
#include "quiver/ddl.hpp"

#include <iosfwd>

namespace quiver {

// Binds parsed commands against the catalog and dispatches them. One session
// owns the output format and the `alpha` query parameter.
class Session {
public:
    enum class Format { Json, Csv };

    Session(Database& db, std::ostream& out) : db_(&db), out_(&out) {}

    Format format = Format::Json;
    // The paper-style "intermediate cut" parameter; large enough to be inert
    // until SET alpha = <value>.
    double alpha = 1e18;
    bool quit_requested = false;

    // Executes one command; returns 0 (ok), 1 (user error) or 2 (internal).
    int run(const std::string& text);
    // Executes a script: commands are separated by ';' or blank lines.
    int run_script(std::istream& in);

    // Binding surfaces (used directly by tests).
    QueryGraph bind_query(const ddl::MatchClause& clause) const;
    void load_schema(const std::string& path);

private:
    int dispatch(const ddl::Command& cmd);
    QueryAtom bind_atom(const QueryGraph& q, const ddl::TextAtom& atom) const;
    PropertyValue bind_scalar(const QueryRef& ref, const ddl::Operand& operand) const;
    double offset_value(const ddl::Operand& operand) const;

    IndexConfig bind_view_common(const ddl::Command& cmd, bool two_hop) const;
    PredAtom bind_view_atom(const ddl::MatchClause& m, const ddl::TextAtom& atom,
                            bool two_hop, EdgeAdjacencyKind kind) const;

    Database* db_;
    std::ostream* out_;
};

} // namespace quiver
