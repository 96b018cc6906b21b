#include "quiver/database.hpp"

#include <json.hpp>

#include <chrono>
#include <mutex>

namespace quiver {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

Database::Database() {
    rebuild_primaries();
}

void Database::rebuild_primaries() {
    fw_ = std::make_unique<PrimaryIndex>(graph_, default_primary_config(Direction::FW));
    bw_ = std::make_unique<PrimaryIndex>(graph_, default_primary_config(Direction::BW));
    register_primaries();
}

void Database::register_primaries() {
    if (!store_.find("primary-fw")) {
        IndexDescriptor fw;
        fw.name = "primary-fw";
        fw.kind = IndexKind::Primary;
        fw.direction = Direction::FW;
        fw.config = fw_->config();
        fw.primary = fw_.get();
        store_.register_descriptor(std::move(fw));
        IndexDescriptor bw;
        bw.name = "primary-bw";
        bw.kind = IndexKind::Primary;
        bw.direction = Direction::BW;
        bw.config = bw_->config();
        bw.primary = bw_.get();
        store_.register_descriptor(std::move(bw));
        return;
    }
    for (IndexDescriptor& d : store_.descriptors_mutable()) {
        if (d.name == "primary-fw") {
            d.primary = fw_.get();
            d.config = fw_->config();
        } else if (d.name == "primary-bw") {
            d.primary = bw_.get();
            d.config = bw_->config();
        }
    }
}

void Database::rebuild_secondary_objects() {
    for (Secondary& sec : secondaries_) {
        if (sec.config.kind == IndexKind::VertexPartitioned) {
            sec.vp = std::make_unique<VertexPartitionedIndex>(
                graph_, primary(sec.config.direction), sec.config);
        } else {
            sec.ep = std::make_unique<EdgePartitionedIndex>(
                graph_, primary(ep_resolution_direction(sec.config.ep_kind)), sec.config,
                ep_cap_factor, 1);
        }
        for (IndexDescriptor& d : store_.descriptors_mutable()) {
            if (d.name != sec.name) continue;
            d.vp = sec.vp.get();
            d.ep = sec.ep.get();
        }
    }
}

LoadReport Database::load_csv(const std::string& vertex_file,
                              const std::string& edge_file) {
    std::unique_lock lock(mutex_);
    const LoadReport report = CsvIo::load(graph_, vertex_file, edge_file);
    rebuild_primaries();
    rebuild_secondary_objects();
    return report;
}

void Database::export_csv(const std::string& vertex_file,
                          const std::string& edge_file) const {
    std::shared_lock lock(mutex_);
    CsvIo::export_graph(graph_, vertex_file, edge_file);
}

double Database::reconfigure_primary(std::vector<PartitioningCriterion> partitioning,
                                     SortCriterion sorting) {
    std::unique_lock lock(mutex_);
    IndexConfig cfg;
    cfg.kind = IndexKind::Primary;
    cfg.direction = Direction::FW;
    cfg.partitioning = std::move(partitioning);
    cfg.sorting = std::move(sorting);
    validate_config(cfg, graph_.catalog());

    const auto t0 = std::chrono::steady_clock::now();
    flush_impl(true, "", -1);
    fw_ = std::make_unique<PrimaryIndex>(graph_, cfg);
    cfg.direction = Direction::BW;
    bw_ = std::make_unique<PrimaryIndex>(graph_, cfg);
    register_primaries();
    rebuild_secondary_objects();
    return seconds_since(t0);
}

double Database::create_vertex_view(const std::string& name, IndexConfig config) {
    std::unique_lock lock(mutex_);
    config.kind = IndexKind::VertexPartitioned;
    validate_config(config, graph_.catalog());
    const std::vector<Direction> dirs =
        config.direction == Direction::FWBW
            ? std::vector<Direction>{Direction::FW, Direction::BW}
            : std::vector<Direction>{config.direction};
    const bool both = config.direction == Direction::FWBW;

    const auto t0 = std::chrono::steady_clock::now();
    flush_impl(true, "", -1);
    for (const Direction dir : dirs) {
        IndexConfig cfg = config;
        cfg.direction = dir;
        const std::string full_name =
            both ? name + (dir == Direction::FW ? "-fw" : "-bw") : name;
        if (store_.find(full_name)) fail(ErrorCode::DuplicateName, full_name);
        Secondary sec;
        sec.name = full_name;
        sec.config = cfg;
        sec.vp = std::make_unique<VertexPartitionedIndex>(graph_, primary(dir), cfg);
        IndexDescriptor d;
        d.name = full_name;
        d.kind = IndexKind::VertexPartitioned;
        d.direction = dir;
        d.config = cfg;
        d.vp = sec.vp.get();
        store_.register_descriptor(std::move(d));
        secondaries_.push_back(std::move(sec));
    }
    return seconds_since(t0);
}

double Database::create_edge_view(const std::string& name, IndexConfig config) {
    std::unique_lock lock(mutex_);
    config.kind = IndexKind::EdgePartitioned;
    validate_config(config, graph_.catalog());
    if (store_.find(name)) fail(ErrorCode::DuplicateName, name);

    const auto t0 = std::chrono::steady_clock::now();
    flush_impl(true, "", -1);
    Secondary sec;
    sec.name = name;
    sec.config = config;
    sec.ep = std::make_unique<EdgePartitionedIndex>(
        graph_, primary(ep_resolution_direction(config.ep_kind)), config, ep_cap_factor,
        ep_build_threads);
    IndexDescriptor d;
    d.name = name;
    d.kind = IndexKind::EdgePartitioned;
    d.ep_kind = config.ep_kind;
    d.config = config;
    d.ep = sec.ep.get();
    store_.register_descriptor(std::move(d));
    secondaries_.push_back(std::move(sec));
    return seconds_since(t0);
}

void Database::drop_index(const std::string& name) {
    std::unique_lock lock(mutex_);
    std::vector<std::string> names;
    if (store_.find(name)) {
        names.push_back(name);
    } else {
        if (store_.find(name + "-fw")) names.push_back(name + "-fw");
        if (store_.find(name + "-bw")) names.push_back(name + "-bw");
    }
    if (names.empty()) fail(ErrorCode::UnknownIndex, name);
    for (const std::string& n : names) {
        if (n == "primary-fw" || n == "primary-bw")
            fail(ErrorCode::InvalidOperation, "primary indexes are required");
        store_.unregister_descriptor(n);
        for (size_t i = 0; i < secondaries_.size(); ++i) {
            if (secondaries_[i].name == n) {
                secondaries_.erase(secondaries_.begin() + static_cast<ptrdiff_t>(i));
                break;
            }
        }
    }
}

Optimizer::Result Database::plan_query(const QueryGraph& query) const {
    std::shared_lock lock(mutex_);
    const CostModel model = CostModel::build(graph_, store_);
    const Optimizer optimizer(graph_, store_, model);
    return optimizer.run(query);
}

Database::QueryResult Database::execute(const QueryGraph& query) const {
    QueryResult result;
    result.plan = plan_query(query).plan;
    std::shared_lock lock(mutex_);
    Executor exec(graph_, result.plan);
    result.rows = exec.all();
    result.stats = exec.stats();
    return result;
}

Database::QueryResult Database::execute_plan(const Plan& plan) const {
    std::shared_lock lock(mutex_);
    QueryResult result;
    result.plan = plan;
    Executor exec(graph_, plan);
    result.rows = exec.all();
    result.stats = exec.stats();
    return result;
}

std::string Database::stats_json(bool pretty) const {
    std::shared_lock lock(mutex_);
    nlohmann::json indexes = nlohmann::json::array();
    for (const IndexDescriptor& d : store_.descriptors()) {
        nlohmann::json j;
        if (d.kind == IndexKind::Primary) {
            const PrimaryIndex::Memory mem = d.primary->memory_usage();
            j["index"] = d.name;
            j["idlist_bytes"] = mem.idlist_bytes;
            j["level_bytes"] = mem.level_bytes;
            j["total"] = mem.total;
        } else if (d.kind == IndexKind::VertexPartitioned) {
            const VertexPartitionedIndex::Memory mem = d.vp->memory_usage();
            j["index"] = d.name;
            j["mode"] = storage_mode_name(d.vp->mode());
            j["offset_bytes"] = mem.offset_bytes;
            j["level_bytes"] = mem.level_bytes;
        } else {
            const EdgePartitionedIndex::Memory mem = d.ep->memory_usage();
            j["index"] = d.name;
            j["kind"] = edge_adjacency_kind_name(d.ep_kind);
            j["indexed_edges"] = d.ep->total_indexed_edges();
            j["offset_bytes"] = mem.offset_bytes;
            j["level_bytes"] = mem.level_bytes;
        }
        indexes.push_back(std::move(j));
    }
    nlohmann::json j;
    j["graph"] = {{"vertices", graph_.vertex_count()},
                  {"edges", graph_.live_edge_count()}};
    j["indexes"] = std::move(indexes);
    return pretty ? j.dump(2) : j.dump();
}

} // namespace quiver
