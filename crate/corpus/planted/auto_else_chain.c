/* planted: the final else returns without unlocking state_lock */
int set_state(int s)
{
	mutex_lock(&state_lock);
	if (s == 0) {
		state = 0;
	} else if (s == 1) {
		state = 1;
	} else {
		return -EINVAL;
	}
	mutex_unlock(&state_lock);
	return 0;
}
