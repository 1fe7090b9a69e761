/* planted: grab_config() locks cfg_mutex and the caller never releases it */
static void grab_config(void)
{
	mutex_lock(&cfg_mutex);
}

static void release_config(void)
{
	mutex_unlock(&cfg_mutex);
}

int read_config(int *out)
{
	grab_config();
	if (*out < 0)
		return -EINVAL;
	*out = config_value;
	release_config();
	return 0;
}
