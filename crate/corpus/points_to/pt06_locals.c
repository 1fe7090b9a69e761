int g;
void f(void) { int *p; int *q; int a; p = &a; q = &g; }
void h(void) { int *p; int b; p = &b; }
