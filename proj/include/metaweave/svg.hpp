#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace metaweave::svg {

/// Fixed 2-decimal formatting for every numeric attribute; "-0.00"
/// normalizes to "0.00" so output never depends on signed zeros.
std::string fmt2(double v);

std::string escape(const std::string& text);

/// Color-blind-safe cyclic palette (Okabe-Ito).
inline constexpr std::array<const char*, 8> kPalette = {
    "#E69F00", "#56B4E9", "#009E73", "#F0E442",
    "#0072B2", "#D55E00", "#CC79A7", "#999999",
};

inline constexpr const char* kMissingColor = "#BDBDBD";

/// Diverging scale #2166AC -> #F7F7F7 -> #B2182B, symmetric about zero:
/// t in [-1, 1] maps negative values toward blue, positive toward red.
std::string diverging_color(double t);

class Element {
public:
    explicit Element(std::string tag) : tag_(std::move(tag)) {}

    Element& set(const std::string& name, const std::string& value);
    Element& set(const std::string& name, const char* value);
    Element& set(const std::string& name, double value); // fmt2
    Element& set(const std::string& name, int value);
    Element& text(std::string content); // escaped on write

    Element& child(std::string tag);
    Element& add(Element element);

    void write(std::string& out, int depth) const;

private:
    std::string tag_;
    std::vector<std::pair<std::string, std::string>> attrs_; // insertion order
    std::vector<Element> children_;
    std::string text_;
};

class SvgDocument {
public:
    SvgDocument(double width, double height, const std::string& title);

    double width() const { return width_; }
    double height() const { return height_; }
    Element& root() { return root_; }

    std::string to_string() const;

private:
    double width_;
    double height_;
    Element root_;
};

} // namespace metaweave::svg
