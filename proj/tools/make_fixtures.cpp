// Regenerates the synthetic fixture documents under fixtures/.

#include <cstdio>
#include <filesystem>
#include <string>

#include "timflow/fixtures.hpp"
#include "timflow/io.hpp"
#include "timflow/render.hpp"

using namespace timflow;

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
    std::filesystem::create_directories(dir / "paths");

    const Product products[] = {fixtures::rectangle(), fixtures::lshape(),
                                fixtures::taboo_islands(), fixtures::border_taboo()};
    const char* names[] = {"rectangle", "lshape", "taboo_islands", "border_taboo"};
    for (int i = 0; i < 4; ++i) {
        const std::string json_file = (dir / (std::string(names[i]) + ".json")).string();
        write_text_file_atomic(json_file, product_to_json(products[i]));
        write_ppm((dir / (std::string(names[i]) + ".ppm")).string(),
                  render_product(products[i], 1));
        std::printf("wrote %s\n", json_file.c_str());
    }

    write_text_file_atomic((dir / "paths" / "rectangle_serpentine.json").string(),
                           path_to_json(fixtures::rectangle_serpentine()));

    DispensePath straight;
    straight.points = {{12.0, 25.0}, {38.0, 25.0}};
    write_text_file_atomic((dir / "paths" / "rectangle_straight.json").string(),
                           path_to_json(straight));

    DispensePath detour;  // wasteful loop wandering outside the cooling area
    detour.points = {{14.0, 19.0}, {44.0, 19.0}, {44.0, 31.0}, {14.0, 31.0}};
    write_text_file_atomic((dir / "paths" / "rectangle_detour.json").string(),
                           path_to_json(detour));

    std::printf("fixtures written to %s\n", dir.string().c_str());
    return 0;
}
