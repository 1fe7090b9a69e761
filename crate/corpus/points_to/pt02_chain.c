int *a; int *b; int *c; int x; int y;
void f(void) { a = &x; b = a; c = b; c = &y; }
