/* planted: the for loop body is a lone semicolon */
int sum(int *a, int n)
{
	int i;
	int s = 0;

	for (i = 0; i < n; i = i + 1);
		s = s + a[i];
	return s;
}
