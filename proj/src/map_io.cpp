#include "covergrid/grid_world.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace covergrid {

std::string to_text(const GridMap& map)
{
    std::string out = std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n";
    out.reserve(out.size() + map.extent().size() + static_cast<std::size_t>(map.height()));
    for (int row = 0; row < map.height(); ++row)
    {
        for (int col = 0; col < map.width(); ++col)
            out.push_back(map.is_obstacle({col, row}) ? '#' : '.');
        out.push_back('\n');
    }
    return out;
}

GridMap map_from_text(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("map: missing header line");

    std::istringstream hs(header);
    int width = 0;
    int height = 0;
    std::string extra;
    if (!(hs >> width >> height) || (hs >> extra) || width <= 0 || height <= 0)
        throw std::runtime_error("map: header must be 'W H' with positive integers");

    std::vector<Terrain> truth;
    truth.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    std::string line;
    for (int row = 0; row < height; ++row)
    {
        if (!std::getline(in, line))
            throw std::runtime_error("map: expected " + std::to_string(height) + " rows, got " + std::to_string(row));
        if (static_cast<int>(line.size()) != width)
            throw std::runtime_error("map: row " + std::to_string(row) + " has wrong length");
        for (char ch : line)
        {
            if (ch == '.')
                truth.push_back(Terrain::Free);
            else if (ch == '#')
                truth.push_back(Terrain::Obstacle);
            else
                throw std::runtime_error(std::string("map: unexpected character '") + ch + "'");
        }
    }
    while (std::getline(in, line))
        if (!line.empty())
            throw std::runtime_error("map: trailing content after last row");
    return GridMap(width, height, std::move(truth));
}

void save_map(const GridMap& map, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write map file: " + path);
    out << to_text(map);
}

GridMap load_map(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read map file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return map_from_text(ss.str());
}

} // namespace covergrid
