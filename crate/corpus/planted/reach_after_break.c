/* planted: the increment after break is dead */
int first_zero(int *a, int n)
{
	int i = 0;

	while (i < n) {
		if (a[i] == 0) {
			break;
			i = i + 1;
		}
		i = i + 1;
	}
	return i;
}
