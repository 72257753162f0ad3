#include "ptqm/numcore.hpp"
int main() { return 0; }
