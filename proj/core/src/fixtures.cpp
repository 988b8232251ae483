#include "timflow/fixtures.hpp"

namespace timflow::fixtures {

namespace {

Product base(int size, const char* name) {
    Product product;
    product.name = name;
    product.grid_width = size;
    product.grid_height = size;
    product.cell_size = 1.0;
    product.areas.cool = Field(size, size, 0.0);
    product.areas.over = Field(size, size, 1.0);
    product.areas.tab = Field(size, size, 0.0);
    return product;
}

void set_cool(Product& product, int x0, int y0, int x1, int y1) {
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            product.areas.cool.at(x, y) = 1.0;
            product.areas.over.at(x, y) = 0.0;
        }
    }
}

void set_taboo(Product& product, int x0, int y0, int x1, int y1) {
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            product.areas.cool.at(x, y) = 0.0;
            product.areas.over.at(x, y) = 1.0;
            product.areas.tab.at(x, y) = 1.0;
        }
    }
}

int scaled(int v, int size) { return v * size / 50; }

}  // namespace

Product rectangle(int size) {
    Product product = base(size, "synthetic-rectangle");
    set_cool(product, scaled(10, size), scaled(15, size), scaled(40, size), scaled(35, size));
    product.gap = {1.0, 1.0, 1.0, 10};
    return product;
}

Product lshape(int size) {
    Product product = base(size, "synthetic-lshape");
    set_cool(product, scaled(10, size), scaled(10, size), scaled(22, size), scaled(40, size));
    set_cool(product, scaled(22, size), scaled(28, size), scaled(40, size), scaled(40, size));
    product.gap = {1.0, 1.0, 1.0, 10};
    return product;
}

Product taboo_islands(int size) {
    Product product = base(size, "synthetic-taboo-islands");
    set_cool(product, scaled(5, size), scaled(11, size), scaled(45, size), scaled(39, size));
    set_taboo(product, scaled(17, size), scaled(23, size), scaled(20, size), scaled(26, size));
    set_taboo(product, scaled(30, size), scaled(23, size), scaled(33, size), scaled(26, size));
    product.gap = {1.0, 1.0, 1.0, 10};
    return product;
}

Product border_taboo(int size) {
    Product product = base(size, "synthetic-border-taboo");
    set_cool(product, scaled(10, size), scaled(8, size), scaled(40, size), scaled(24, size));
    set_taboo(product, 0, scaled(32, size), size, scaled(35, size));
    product.gap = {1.0, 1.0, 0.5, 8};
    return product;
}

DispensePath rectangle_serpentine() {
    DispensePath path;
    path.points = {{14.0, 19.0}, {36.0, 19.0}, {36.0, 25.0},
                   {14.0, 25.0}, {14.0, 31.0}, {36.0, 31.0}};
    path.feedrate = 0.0;
    return path;
}

}  // namespace timflow::fixtures
