#include <cstdio>
int main(){ std::puts("trajlab"); return 0; }
