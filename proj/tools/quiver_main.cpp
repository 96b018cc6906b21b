#include "quiver/session.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"quiver - in-memory property graph engine with tunable adjacency indexes"};

    std::string vertices_file, edges_file, schema_file, script_file;
    std::string output = "json";
    app.add_option("--vertices", vertices_file, "vertex CSV to load at startup");
    app.add_option("--edges", edges_file, "edge CSV to load at startup");
    app.add_option("--schema", schema_file, "property schema JSON");
    app.add_option("--script", script_file, "command script to run (batch mode)");
    app.add_option("--output", output, "match output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI11_PARSE(app, argc, argv);

    quiver::Database db;
    quiver::Session session(db, std::cout);
    session.format = output == "csv" ? quiver::Session::Format::Csv
                                     : quiver::Session::Format::Json;

    try {
        if (!schema_file.empty()) session.load_schema(schema_file);
        if (!vertices_file.empty() || !edges_file.empty()) {
            if (vertices_file.empty() || edges_file.empty()) {
                std::cerr << "--vertices and --edges must be given together\n";
                return 1;
            }
            const quiver::LoadReport report = db.load_csv(vertices_file, edges_file);
            std::cerr << "loaded " << report.vertices << " vertices, " << report.edges
                      << " edges (" << report.rejected << " rejected)\n";
        }
    } catch (const quiver::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    if (!script_file.empty()) {
        std::ifstream in(script_file);
        if (!in) {
            std::cerr << "cannot open script " << script_file << "\n";
            return 1;
        }
        return session.run_script(in);
    }

    // Interactive loop: a command runs when a line ends with ';' or on a
    // blank line.
    std::cerr << "quiver ready; end commands with ';' or a blank line. QUIT; exits.\n";
    const int code = session.run_script(std::cin);
    return code;
}
