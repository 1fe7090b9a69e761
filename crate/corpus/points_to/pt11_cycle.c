int *a; int *b; int *c; int x; int y; int z;
void f(void) { a = &x; b = &y; c = &z; a = b; b = c; c = a; }
