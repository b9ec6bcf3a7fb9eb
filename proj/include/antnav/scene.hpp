#pragma once

#include "antnav/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace antnav {

enum class Cell : std::uint8_t { free = 0, wall = 1 };

enum class SceneKind { open, convex_obstacle, concave_obstacle, corridor, cluttered };

const char *to_string(SceneKind kind);
SceneKind scene_kind_from_string(std::string_view name);

inline constexpr double kDefaultCellSize = 0.25;
inline constexpr double kDefaultCatchmentRadius = 0.2;

// Closed occupancy grid. Cell (cx, cy) covers [cx*s, (cx+1)*s) x [cy*s, (cy+1)*s)
// in world metres; row cy is line cy of the scene file.
class Scene {
public:
    Scene(int width, int height, double cell_size, std::vector<Cell> cells,
          std::uint64_t texture_seed = 0, std::string name = {});

    int width() const { return width_; }
    int height() const { return height_; }
    double cell_size() const { return cell_size_; }
    std::uint64_t texture_seed() const { return texture_seed_; }
    const std::string &name() const { return name_; }
    const std::vector<Cell> &cells() const { return cells_; }

    bool in_bounds(int cx, int cy) const { return cx >= 0 && cy >= 0 && cx < width_ && cy < height_; }
    // Out-of-bounds cells read as walls.
    bool is_wall(int cx, int cy) const
    {
        return !in_bounds(cx, cy) || cells_[static_cast<std::size_t>(cy) * width_ + cx] == Cell::wall;
    }
    bool is_free(int cx, int cy) const { return !is_wall(cx, cy); }

    int cell_x(double x) const { return static_cast<int>(std::floor(x / cell_size_)); }
    int cell_y(double y) const { return static_cast<int>(std::floor(y / cell_size_)); }
    bool is_free_point(Vec2 p) const { return is_free(cell_x(p.x), cell_y(p.y)); }
    bool contains(Vec2 p) const { return in_bounds(cell_x(p.x), cell_y(p.y)); }
    Vec2 cell_center(int cx, int cy) const { return {(cx + 0.5) * cell_size_, (cy + 0.5) * cell_size_}; }

    std::size_t free_cell_count() const;

    bool operator==(const Scene &) const = default;

private:
    int width_;
    int height_;
    double cell_size_;
    std::vector<Cell> cells_;
    std::uint64_t texture_seed_;
    std::string name_;
};

// Builder for generators and tests; enforces the walled boundary on build().
class SceneBuilder {
public:
    SceneBuilder(int width, int height, double cell_size = kDefaultCellSize);

    SceneBuilder &wall(int cx, int cy);
    SceneBuilder &clear(int cx, int cy);
    // Inclusive cell rectangle.
    SceneBuilder &fill(int x0, int y0, int x1, int y1, Cell value = Cell::wall);
    bool is_wall(int cx, int cy) const;

    Scene build(std::uint64_t texture_seed = 0, std::string name = {}) const;

    int width() const { return width_; }
    int height() const { return height_; }

private:
    int width_;
    int height_;
    double cell_size_;
    std::vector<Cell> cells_;
};

struct EpisodeSpec {
    std::shared_ptr<const Scene> scene;
    Pose start;
    Vec2 goal;
    double catchment_radius = kDefaultCatchmentRadius;
};

// Throws std::invalid_argument when start/goal are not free or the goal is unreachable.
void validate_episode(const EpisodeSpec &spec);

// ---------------------------------------------------------------------------
// Procedural generation
// ---------------------------------------------------------------------------

struct GeneratedEpisode {
    Scene scene;
    Pose start;
    Vec2 goal;
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GenerationOptions {
    // Block placements for cluttered scenes; 0 means size*size/64 (at least 3).
    int clutter_blocks = 0;
};

// Deterministic in (kind, seed, size, options). Every kind carries a canonical
// start/goal pair. Throws GenerationError after 100 disconnected attempts.
GeneratedEpisode generate_episode(SceneKind kind, std::uint64_t seed, int size, const GenerationOptions &options = {});
Scene generate_scene(SceneKind kind, std::uint64_t seed, int size, const GenerationOptions &options = {});
EpisodeSpec make_episode(SceneKind kind, std::uint64_t seed, int size, const GenerationOptions &options = {});

// Fixed 32x32 corridor used for steering-bias studies. The corridor's high-y
// wall extends west past the block face, leaving a concave pocket on the
// start's side; a leftward drift carries the robot into it. The start faces
// the goal.
GeneratedEpisode trap_side_corridor();

// Mirror about the horizontal mid-line (cy -> height-1-cy).
Scene mirror_rows(const Scene &scene);

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

class SceneParseError : public std::runtime_error {
public:
    enum class Code { missing_header, bad_cell_size, inconsistent_row_length, unknown_glyph, open_boundary, too_small, io };

    SceneParseError(Code code, const std::string &what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

Scene parse_scene(std::string_view text, std::uint64_t texture_seed = 0, std::string name = {});
std::string format_scene(const Scene &scene);

// Writes `path` and the sidecar `path + ".json"` ({name, texture_seed}).
void save_scene(const Scene &scene, const std::filesystem::path &path);
// The sidecar is optional.
Scene load_scene(const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// Geodesic oracle
// ---------------------------------------------------------------------------

// Uniform-cost search over free cells with 8-connected moves (no corner
// cutting), measured between the centres of the cells containing a and b.
std::optional<double> geodesic_distance(const Scene &scene, Vec2 a, Vec2 b);

// Distance field from the cell containing `target` to every cell (infinity
// for unreachable / wall cells), indexed cy * width + cx.
std::vector<double> geodesic_field(const Scene &scene, Vec2 target);

// geodesic / euclidean; 1.0 when start == goal. Throws for an unreachable goal.
double complexity_ratio(const EpisodeSpec &spec);

// True if the straight segment a-b touches any wall cell (supercover traversal).
bool segment_hits_wall(const Scene &scene, Vec2 a, Vec2 b);

}  // namespace antnav
