#include "antnav/scene.hpp"

#include "antnav/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

namespace antnav {

namespace {

constexpr int kMaxGenerationAttempts = 100;

std::size_t index_of(int width, int cx, int cy)
{
    return static_cast<std::size_t>(cy) * static_cast<std::size_t>(width) + static_cast<std::size_t>(cx);
}

}  // namespace

const char *to_string(SceneKind kind)
{
    switch (kind) {
    case SceneKind::open: return "open";
    case SceneKind::convex_obstacle: return "convex_obstacle";
    case SceneKind::concave_obstacle: return "concave_obstacle";
    case SceneKind::corridor: return "corridor";
    case SceneKind::cluttered: return "cluttered";
    }
    return "?";
}

SceneKind scene_kind_from_string(std::string_view name)
{
    for (auto kind : {SceneKind::open, SceneKind::convex_obstacle, SceneKind::concave_obstacle,
                      SceneKind::corridor, SceneKind::cluttered}) {
        if (name == to_string(kind))
            return kind;
    }
    throw std::invalid_argument("unknown scene kind: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Scene
// ---------------------------------------------------------------------------

Scene::Scene(int width, int height, double cell_size, std::vector<Cell> cells, std::uint64_t texture_seed,
             std::string name)
    : width_(width), height_(height), cell_size_(cell_size), cells_(std::move(cells)),
      texture_seed_(texture_seed), name_(std::move(name))
{
    if (width_ < 3 || height_ < 3)
        throw std::invalid_argument("scene grid must be at least 3x3");
    if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_))
        throw std::invalid_argument("cell_size must be positive");
    if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
        throw std::invalid_argument("cell count does not match grid dimensions");
    for (int cx = 0; cx < width_; ++cx) {
        if (cells_[index_of(width_, cx, 0)] != Cell::wall || cells_[index_of(width_, cx, height_ - 1)] != Cell::wall)
            throw std::invalid_argument("scene boundary must be walled");
    }
    for (int cy = 0; cy < height_; ++cy) {
        if (cells_[index_of(width_, 0, cy)] != Cell::wall || cells_[index_of(width_, width_ - 1, cy)] != Cell::wall)
            throw std::invalid_argument("scene boundary must be walled");
    }
}

std::size_t Scene::free_cell_count() const
{
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), Cell::free));
}

SceneBuilder::SceneBuilder(int width, int height, double cell_size)
    : width_(width), height_(height), cell_size_(cell_size),
      cells_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), Cell::free)
{
    if (width < 3 || height < 3)
        throw std::invalid_argument("scene grid must be at least 3x3");
}

SceneBuilder &SceneBuilder::wall(int cx, int cy)
{
    if (cx >= 0 && cy >= 0 && cx < width_ && cy < height_)
        cells_[index_of(width_, cx, cy)] = Cell::wall;
    return *this;
}

SceneBuilder &SceneBuilder::clear(int cx, int cy)
{
    if (cx >= 0 && cy >= 0 && cx < width_ && cy < height_)
        cells_[index_of(width_, cx, cy)] = Cell::free;
    return *this;
}

SceneBuilder &SceneBuilder::fill(int x0, int y0, int x1, int y1, Cell value)
{
    for (int cy = std::min(y0, y1); cy <= std::max(y0, y1); ++cy)
        for (int cx = std::min(x0, x1); cx <= std::max(x0, x1); ++cx)
            value == Cell::wall ? wall(cx, cy) : clear(cx, cy);
    return *this;
}

bool SceneBuilder::is_wall(int cx, int cy) const
{
    if (cx < 0 || cy < 0 || cx >= width_ || cy >= height_)
        return true;
    return cells_[index_of(width_, cx, cy)] == Cell::wall;
}

Scene SceneBuilder::build(std::uint64_t texture_seed, std::string name) const
{
    auto cells = cells_;
    for (int cx = 0; cx < width_; ++cx) {
        cells[index_of(width_, cx, 0)] = Cell::wall;
        cells[index_of(width_, cx, height_ - 1)] = Cell::wall;
    }
    for (int cy = 0; cy < height_; ++cy) {
        cells[index_of(width_, 0, cy)] = Cell::wall;
        cells[index_of(width_, width_ - 1, cy)] = Cell::wall;
    }
    return Scene(width_, height_, cell_size_, std::move(cells), texture_seed, std::move(name));
}

void validate_episode(const EpisodeSpec &spec)
{
    if (!spec.scene)
        throw std::invalid_argument("episode has no scene");
    if (!spec.scene->is_free_point(spec.start.position()))
        throw std::invalid_argument("start position is not in a free cell");
    if (!spec.scene->is_free_point(spec.goal))
        throw std::invalid_argument("goal is not in a free cell");
    if (!geodesic_distance(*spec.scene, spec.start.position(), spec.goal))
        throw std::invalid_argument("goal is unreachable from start");
    if (!(spec.catchment_radius > 0.0))
        throw std::invalid_argument("catchment radius must be positive");
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

struct Layout {
    SceneBuilder grid;
    int start_x, start_y;
    int goal_x, goal_y;
};

// Start bottom-left, goal top-right; obstacles straddle the diagonal beeline.
Layout diagonal_layout(int size)
{
    return {SceneBuilder(size, size), 3, 3, size - 4, size - 4};
}

Layout horizontal_layout(int size, Rng &rng)
{
    const int mid = size / 2;
    const int jitter = std::max(1, size / 10);
    return {SceneBuilder(size, size), 3, mid + rng.uniform_int(-jitter, jitter), size - 4,
            mid + rng.uniform_int(-jitter, jitter)};
}

Layout generate_open(int size, Rng &rng) { return horizontal_layout(size, rng); }

// Large axis-aligned block centred on the diagonal beeline.
Layout generate_convex(int size, Rng &rng)
{
    Layout layout = diagonal_layout(size);
    const int mid = size / 2;
    const int half = std::max(2, static_cast<int>(std::lround(size * 0.16)) + rng.uniform_int(-1, 1));
    layout.grid.fill(mid - half, mid - half, mid + half - 1, mid + half - 1);
    return layout;
}

// Corner trap: two arms meeting at a concave corner on the beeline, opening
// toward the start. One-cell lips at the arm ends narrow the mouth.
Layout generate_concave(int size, Rng &rng)
{
    Layout layout = diagonal_layout(size);
    const int mid = size / 2;
    const int corner = mid + std::max(1, size / 16);
    const int arm = std::max(3, static_cast<int>(std::lround(size * 0.12)) + rng.uniform_int(-1, 1));
    const int lip = 1;
    auto &g = layout.grid;
    g.fill(corner - arm, corner, corner, corner);   // arm along x (far side in y)
    g.fill(corner, corner - arm, corner, corner);   // arm along y (far side in x)
    g.fill(corner - arm, corner - lip, corner - arm, corner);
    g.fill(corner - lip, corner - arm, corner, corner - arm);
    return layout;
}

// West-to-east corridor holding the goal. The block on the low-y side has a
// long west-facing wall that juts toward the start.
Layout generate_corridor(int size, Rng &rng)
{
    const int mid = size / 2;
    Layout layout{SceneBuilder(size, size), 3, 0, size - 4, mid};
    const int half_width = 1 + rng.uniform_int(0, 1);
    const int entrance = mid - std::max(2, size / 8) + rng.uniform_int(-1, 1);
    auto &g = layout.grid;
    g.fill(entrance, mid + half_width + 1, size - 1, size - 1);          // high-y block
    g.fill(entrance - std::max(2, size / 8), 0, size - 1, mid - half_width - 1);  // low-y block (juts west)
    layout.start_y = mid + half_width + std::max(2, size / 8) + rng.uniform_int(0, 1);
    layout.start_y = std::min(layout.start_y, size - 3);
    return layout;
}

Layout generate_cluttered(int size, int requested_blocks, Rng &rng)
{
    Layout layout = horizontal_layout(size, rng);
    const int blocks = requested_blocks > 0 ? requested_blocks : std::max(3, size * size / 64);
    auto near_endpoint = [&](int cx, int cy) {
        const auto close = [](int ax, int ay, int bx, int by) { return std::abs(ax - bx) <= 2 && std::abs(ay - by) <= 2; };
        return close(cx, cy, layout.start_x, layout.start_y) || close(cx, cy, layout.goal_x, layout.goal_y);
    };
    for (int b = 0; b < blocks; ++b) {
        const int w = rng.uniform_int(1, 3);
        const int h = rng.uniform_int(1, 3);
        const int x0 = rng.uniform_int(2, size - 2 - w);
        const int y0 = rng.uniform_int(2, size - 2 - h);
        bool blocked = false;
        for (int cy = y0; cy < y0 + h && !blocked; ++cy)
            for (int cx = x0; cx < x0 + w && !blocked; ++cx)
                blocked = near_endpoint(cx, cy);
        if (!blocked)
            layout.grid.fill(x0, y0, x0 + w - 1, y0 + h - 1);
    }
    return layout;
}

}  // namespace

GeneratedEpisode generate_episode(SceneKind kind, std::uint64_t seed, int size, const GenerationOptions &options)
{
    if (size < 8)
        throw std::invalid_argument("scene size must be at least 8 cells");

    for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        Layout layout = [&] {
            switch (kind) {
            case SceneKind::open: return generate_open(size, rng);
            case SceneKind::convex_obstacle: return generate_convex(size, rng);
            case SceneKind::concave_obstacle: return generate_concave(size, rng);
            case SceneKind::corridor: return generate_corridor(size, rng);
            case SceneKind::cluttered: return generate_cluttered(size, options.clutter_blocks, rng);
            }
            throw std::invalid_argument("unknown scene kind");
        }();
        const std::uint64_t texture_seed = rng.next();
        const double heading = wrap_angle(rng.uniform(-kPi, kPi));
        std::string name = std::string(to_string(kind)) + "-" + std::to_string(seed) + "-" + std::to_string(size);
        Scene scene = layout.grid.build(texture_seed, std::move(name));
        if (scene.is_wall(layout.start_x, layout.start_y) || scene.is_wall(layout.goal_x, layout.goal_y))
            continue;
        const Vec2 start = scene.cell_center(layout.start_x, layout.start_y);
        const Vec2 goal = scene.cell_center(layout.goal_x, layout.goal_y);
        if (!geodesic_distance(scene, start, goal))
            continue;
        return {std::move(scene), Pose{start.x, start.y, heading}, goal};
    }
    throw GenerationError(std::string("could not generate a connected ") + to_string(kind) + " scene");
}

GeneratedEpisode trap_side_corridor()
{
    constexpr int size = 32, mid = 16, half_width = 2, entrance = 14, stub_tip = 9;
    SceneBuilder b(size, size, 0.25);
    b.fill(entrance, 1, size - 2, mid - half_width - 1);
    b.fill(entrance, mid + half_width + 1, size - 2, size - 2);
    b.fill(stub_tip, mid + half_width + 1, entrance - 1, mid + half_width + 2);
    Scene scene = b.build(7, "trap-side-corridor");
    const Vec2 start{3.5 * 0.25, 22.0 * 0.25};
    const Vec2 goal{(size - 3.5) * 0.25, (mid + 0.5) * 0.25};
    return {std::move(scene), Pose{start.x, start.y, (goal - start).angle()}, goal};
}

Scene generate_scene(SceneKind kind, std::uint64_t seed, int size, const GenerationOptions &options)
{
    return generate_episode(kind, seed, size, options).scene;
}

EpisodeSpec make_episode(SceneKind kind, std::uint64_t seed, int size, const GenerationOptions &options)
{
    auto generated = generate_episode(kind, seed, size, options);
    return {std::make_shared<const Scene>(std::move(generated.scene)), generated.start, generated.goal,
            kDefaultCatchmentRadius};
}

Scene mirror_rows(const Scene &scene)
{
    std::vector<Cell> cells(scene.cells().size());
    for (int cy = 0; cy < scene.height(); ++cy)
        for (int cx = 0; cx < scene.width(); ++cx)
            cells[index_of(scene.width(), cx, scene.height() - 1 - cy)] = scene.cells()[index_of(scene.width(), cx, cy)];
    return Scene(scene.width(), scene.height(), scene.cell_size(), std::move(cells), scene.texture_seed(),
                 scene.name() + "-mirrored");
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

Scene parse_scene(std::string_view text, std::uint64_t texture_seed, std::string name)
{
    using Code = SceneParseError::Code;
    std::istringstream in{std::string(text)};
    std::string line;

    auto strip = [](std::string &s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
            s.pop_back();
    };

    if (!std::getline(in, line))
        throw SceneParseError(Code::missing_header, "missing cell_size header");
    strip(line);
    constexpr std::string_view prefix = "cell_size=";
    if (line.rfind(prefix, 0) != 0)
        throw SceneParseError(Code::missing_header, "missing cell_size header");
    double cell_size = 0.0;
    try {
        std::size_t used = 0;
        const std::string value = line.substr(prefix.size());
        cell_size = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument("trailing characters");
    } catch (const std::exception &) {
        throw SceneParseError(Code::bad_cell_size, "cell_size is not a number");
    }
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw SceneParseError(Code::bad_cell_size, "cell_size must be positive");

    std::vector<Cell> cells;
    int width = -1;
    int height = 0;
    while (std::getline(in, line)) {
        strip(line);
        if (line.empty())
            continue;
        if (width >= 0 && static_cast<int>(line.size()) != width)
            throw SceneParseError(Code::inconsistent_row_length,
                                  "inconsistent row length at grid row " + std::to_string(height));
        width = static_cast<int>(line.size());
        for (std::size_t i = 0; i < line.size(); ++i) {
            switch (line[i]) {
            case '#': cells.push_back(Cell::wall); break;
            case '.': cells.push_back(Cell::free); break;
            default:
                throw SceneParseError(Code::unknown_glyph, "unknown cell glyph '" + std::string(1, line[i]) +
                                                               "' at row " + std::to_string(height) + ", column " +
                                                               std::to_string(i));
            }
        }
        ++height;
    }
    if (width < 3 || height < 3)
        throw SceneParseError(Code::too_small, "scene grid must be at least 3x3");
    for (int cx = 0; cx < width; ++cx)
        for (int cy : {0, height - 1})
            if (cells[index_of(width, cx, cy)] != Cell::wall)
                throw SceneParseError(Code::open_boundary, "boundary cell is not a wall");
    for (int cy = 0; cy < height; ++cy)
        for (int cx : {0, width - 1})
            if (cells[index_of(width, cx, cy)] != Cell::wall)
                throw SceneParseError(Code::open_boundary, "boundary cell is not a wall");
    return Scene(width, height, cell_size, std::move(cells), texture_seed, std::move(name));
}

std::string format_scene(const Scene &scene)
{
    std::ostringstream out;
    out.precision(17);
    out << "cell_size=" << scene.cell_size() << '\n';
    for (int cy = 0; cy < scene.height(); ++cy) {
        for (int cx = 0; cx < scene.width(); ++cx)
            out << (scene.is_wall(cx, cy) ? '#' : '.');
        out << '\n';
    }
    return out.str();
}

void save_scene(const Scene &scene, const std::filesystem::path &path)
{
    {
        std::ofstream out(path);
        if (!out)
            throw SceneParseError(SceneParseError::Code::io, "cannot write " + path.string());
        out << format_scene(scene);
    }
    nlohmann::json sidecar{{"name", scene.name()}, {"texture_seed", scene.texture_seed()}};
    std::ofstream out(path.string() + ".json");
    out << sidecar.dump(2) << '\n';
}

Scene load_scene(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw SceneParseError(SceneParseError::Code::io, "cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();

    std::uint64_t texture_seed = 0;
    std::string name = path.stem().string();
    const std::filesystem::path sidecar = path.string() + ".json";
    if (std::filesystem::exists(sidecar)) {
        std::ifstream side(sidecar);
        const auto meta = nlohmann::json::parse(side);
        name = meta.value("name", name);
        texture_seed = meta.value("texture_seed", std::uint64_t{0});
    }
    return parse_scene(buffer.str(), texture_seed, std::move(name));
}

// ---------------------------------------------------------------------------
// Geodesic oracle
// ---------------------------------------------------------------------------

std::vector<double> geodesic_field(const Scene &scene, Vec2 target)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int w = scene.width();
    const int h = scene.height();
    std::vector<double> dist(static_cast<std::size_t>(w) * h, inf);
    const int tx = scene.cell_x(target.x);
    const int ty = scene.cell_y(target.y);
    if (scene.is_wall(tx, ty))
        return dist;

    const double straight = scene.cell_size();
    const double diagonal = scene.cell_size() * std::numbers::sqrt2;
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    dist[index_of(w, tx, ty)] = 0.0;
    open.emplace(0.0, index_of(w, tx, ty));
    while (!open.empty()) {
        const auto [d, idx] = open.top();
        open.pop();
        if (d > dist[idx])
            continue;
        const int cx = static_cast<int>(idx % w);
        const int cy = static_cast<int>(idx / w);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0)
                    continue;
                const int nx = cx + dx;
                const int ny = cy + dy;
                if (scene.is_wall(nx, ny))
                    continue;
                const bool diag = dx != 0 && dy != 0;
                if (diag && (scene.is_wall(cx + dx, cy) || scene.is_wall(cx, cy + dy)))
                    continue;
                const double nd = d + (diag ? diagonal : straight);
                const std::size_t nidx = index_of(w, nx, ny);
                if (nd < dist[nidx]) {
                    dist[nidx] = nd;
                    open.emplace(nd, nidx);
                }
            }
        }
    }
    return dist;
}

std::optional<double> geodesic_distance(const Scene &scene, Vec2 a, Vec2 b)
{
    const int ax = scene.cell_x(a.x);
    const int ay = scene.cell_y(a.y);
    if (scene.is_wall(ax, ay) || scene.is_wall(scene.cell_x(b.x), scene.cell_y(b.y)))
        return std::nullopt;
    const auto field = geodesic_field(scene, b);
    const double d = field[index_of(scene.width(), ax, ay)];
    if (!std::isfinite(d))
        return std::nullopt;
    return d;
}

double complexity_ratio(const EpisodeSpec &spec)
{
    const Vec2 start = spec.start.position();
    const auto geodesic = geodesic_distance(*spec.scene, start, spec.goal);
    if (!geodesic)
        throw std::invalid_argument("complexity ratio of an unreachable goal");
    const double euclidean = distance(start, spec.goal);
    if (euclidean == 0.0 || *geodesic == 0.0)
        return 1.0;
    return std::max(1.0, *geodesic / euclidean);
}

bool segment_hits_wall(const Scene &scene, Vec2 a, Vec2 b)
{
    // Amanatides-Woo traversal over the cells crossed by the segment.
    const double s = scene.cell_size();
    int cx = scene.cell_x(a.x);
    int cy = scene.cell_y(a.y);
    const int ex = scene.cell_x(b.x);
    const int ey = scene.cell_y(b.y);
    const Vec2 d = b - a;
    const int step_x = d.x > 0 ? 1 : (d.x < 0 ? -1 : 0);
    const int step_y = d.y > 0 ? 1 : (d.y < 0 ? -1 : 0);
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double delta_x = step_x != 0 ? s / std::abs(d.x) : inf;
    const double delta_y = step_y != 0 ? s / std::abs(d.y) : inf;
    double t_x = step_x > 0 ? ((cx + 1) * s - a.x) / d.x : (step_x < 0 ? (cx * s - a.x) / d.x : inf);
    double t_y = step_y > 0 ? ((cy + 1) * s - a.y) / d.y : (step_y < 0 ? (cy * s - a.y) / d.y : inf);

    if (scene.is_wall(cx, cy))
        return true;
    while (cx != ex || cy != ey) {
        if (t_x < t_y) {
            if (t_x > 1.0)
                break;
            cx += step_x;
            t_x += delta_x;
        } else if (t_y < t_x) {
            if (t_y > 1.0)
                break;
            cy += step_y;
            t_y += delta_y;
        } else {
            if (t_x > 1.0)
                break;
            // Exact corner crossing: both side cells are touched.
            if (scene.is_wall(cx + step_x, cy) || scene.is_wall(cx, cy + step_y))
                return true;
            cx += step_x;
            cy += step_y;
            t_x += delta_x;
            t_y += delta_y;
        }
        if (scene.is_wall(cx, cy))
            return true;
    }
    return false;
}

}  // namespace antnav
